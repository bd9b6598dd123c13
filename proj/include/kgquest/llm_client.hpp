// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors
//
// Chat-completion client: OpenAI-compatible HTTP backend, deterministic mock
// backends, bounded retries, a per-client in-flight cap, and the per-purpose
// call ledger.

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "kgquest/kg_store.hpp"

namespace kgquest {

enum class Purpose { Refine, DirectGenerate, Judge };
inline constexpr std::array<Purpose, 3> kAllPurposes = {Purpose::Refine, Purpose::DirectGenerate,
                                                         Purpose::Judge};
std::string_view to_string(Purpose p);

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_tokens = 256;

  /// user non-empty, temperature in [0, 2], max_tokens > 0.
  void validate() const;
};

struct ChatResponse {
  std::string text;
  std::chrono::duration<double> latency{0};
  std::string model;
};

class LlmError : public std::runtime_error {
 public:
  enum class Kind { Timeout, HttpError, RateLimited, EmptyCompletion, MalformedCompletion };

  LlmError(Kind kind, const std::string& what, int status = 0)
      : std::runtime_error(what), kind_(kind), status_(status) {}

  Kind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }
  bool retryable() const noexcept {
    return kind_ == Kind::Timeout || kind_ == Kind::RateLimited ||
           (kind_ == Kind::HttpError && status_ >= 500);
  }

 private:
  Kind kind_;
  int status_;
};

std::string_view to_string(LlmError::Kind k);

/// Successful-call counters and latency per purpose. Monotonic; thread-safe.
class CallLedger {
 public:
  void record_success(Purpose p, std::chrono::duration<double> latency);
  void record_failure(Purpose p);

  std::uint64_t calls(Purpose p) const { return slot(p).calls.load(); }
  std::uint64_t failures(Purpose p) const { return slot(p).failures.load(); }
  double latency_seconds(Purpose p) const;

  nlohmann::ordered_json to_json() const;

 private:
  struct Slot {
    std::atomic<std::uint64_t> calls{0};
    std::atomic<std::uint64_t> failures{0};
    std::atomic<std::int64_t> latency_ns{0};
  };
  const Slot& slot(Purpose p) const { return slots_[static_cast<std::size_t>(p)]; }
  Slot& slot(Purpose p) { return slots_[static_cast<std::size_t>(p)]; }

  std::array<Slot, 3> slots_;
};

/// Request/response log, written sorted so that concurrent completion order
/// does not leak into the file. Latency is deliberately not recorded.
class Transcript {
 public:
  void record(Purpose p, const ChatRequest& req, std::string_view outcome, bool ok);
  void write_jsonl(const std::filesystem::path& path) const;
  std::size_t size() const;

 private:
  struct Entry {
    std::string purpose, model, system, user, outcome;
    bool ok;
    auto tie() const { return std::tie(purpose, model, user, system, outcome, ok); }
  };
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

/// One attempt against a model endpoint. Throws LlmError.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& req) = 0;
};

struct MockSpec {
  enum class Mode { Identity, Fixed, Canned, Scripted, Unreachable };
  Mode mode = Mode::Identity;
  std::string fixed_text;
  std::map<std::string, std::string> canned;
  std::vector<std::string> script;

  static MockSpec from_json(const nlohmann::json& j);
};

/// Identity echoes the quoted question of the user message (or the whole
/// user message when it has none). Canned matches the full user text, then
/// the quoted question. Scripted replays responses in order. Unreachable
/// always times out.
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(MockSpec spec) : spec_(std::move(spec)) {}
  ChatResponse send(const ChatRequest& req) override;
  std::size_t attempts() const { return attempts_.load(); }

 private:
  MockSpec spec_;
  std::mutex mu_;
  std::size_t cursor_ = 0;
  std::atomic<std::size_t> attempts_{0};
};

/// POSTs OpenAI-style `{"model","messages","temperature","max_tokens"}` and
/// reads `choices[0].message.content`.
class HttpBackend : public ChatBackend {
 public:
  HttpBackend(std::string url, std::string api_key, std::chrono::milliseconds timeout);
  ~HttpBackend() override;
  ChatResponse send(const ChatRequest& req) override;

  static nlohmann::json request_body(const ChatRequest& req);
  static std::string parse_response_body(std::string_view body);

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_backoff{250};
  std::chrono::milliseconds max_backoff{8000};
};

class LlmClient {
 public:
  LlmClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<CallLedger> ledger,
            RetryPolicy retry = {}, std::size_t max_in_flight = 4,
            std::shared_ptr<Transcript> transcript = nullptr);

  /// Sends with retries. Increments the ledger exactly once on success.
  ChatResponse complete(const ChatRequest& req, Purpose purpose);

  CallLedger& ledger() { return *ledger_; }

 private:
  class Gate {
   public:
    explicit Gate(std::size_t cap) : free_(cap == 0 ? 1 : cap) {}
    void acquire();
    void release();

   private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::size_t free_;
  };

  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<CallLedger> ledger_;
  RetryPolicy retry_;
  std::shared_ptr<Transcript> transcript_;
  std::unique_ptr<Gate> gate_;
};

/// Endpoint settings for one purpose, as found in the run config.
struct EndpointConfig {
  std::string kind = "mock";  // "mock" or "http"
  std::string url;
  std::string model = "mock";
  std::string api_key_env = "KGQUEST_API_KEY";
  double timeout_seconds = 60;
  int max_attempts = 5;
  int backoff_ms = 250;
  std::size_t concurrency = 4;
  double temperature = 0.0;
  int max_tokens = 256;
  MockSpec mock;

  static EndpointConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  std::shared_ptr<ChatBackend> make_backend() const;
  RetryPolicy retry_policy() const;
  ChatRequest request(std::string system, std::string user) const;
};

/// One-line question for a triplet via the direct-generation prompt.
/// Throws LlmError(MalformedCompletion) for multi-line output or a missing `?`.
std::string direct_generate_question(const Triplet& t, LlmClient& client,
                                     const EndpointConfig& endpoint);

/// Trims and checks the one-line/terminal-`?` format rule.
std::string validate_question_line(std::string_view completion);

}  // namespace kgquest
