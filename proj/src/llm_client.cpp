// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include "kgquest/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "kgquest/prompts.hpp"
#include "kgquest/text_util.hpp"

namespace kgquest {

std::string_view to_string(Purpose p) {
  switch (p) {
    case Purpose::Refine: return "refine";
    case Purpose::DirectGenerate: return "direct_generate";
    case Purpose::Judge: return "judge";
  }
  return "refine";
}

std::string_view to_string(LlmError::Kind k) {
  switch (k) {
    case LlmError::Kind::Timeout: return "Timeout";
    case LlmError::Kind::HttpError: return "HttpError";
    case LlmError::Kind::RateLimited: return "RateLimited";
    case LlmError::Kind::EmptyCompletion: return "EmptyCompletion";
    case LlmError::Kind::MalformedCompletion: return "MalformedCompletion";
  }
  return "HttpError";
}

void ChatRequest::validate() const {
  if (user.empty()) throw std::invalid_argument("chat request has an empty user message");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw std::invalid_argument("temperature must be in [0, 2]");
  }
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
}

// ---- ledger ---------------------------------------------------------------

void CallLedger::record_success(Purpose p, std::chrono::duration<double> latency) {
  auto& s = slot(p);
  s.calls.fetch_add(1);
  s.latency_ns.fetch_add(
      std::chrono::duration_cast<std::chrono::nanoseconds>(latency).count());
}

void CallLedger::record_failure(Purpose p) { slot(p).failures.fetch_add(1); }

double CallLedger::latency_seconds(Purpose p) const {
  return static_cast<double>(slot(p).latency_ns.load()) * 1e-9;
}

nlohmann::ordered_json CallLedger::to_json() const {
  nlohmann::ordered_json j;
  for (auto p : kAllPurposes) {
    j[std::string(to_string(p))] = {{"calls", calls(p)},
                                    {"failures", failures(p)},
                                    {"latency_seconds", latency_seconds(p)}};
  }
  return j;
}

// ---- transcript -----------------------------------------------------------

void Transcript::record(Purpose p, const ChatRequest& req, std::string_view outcome, bool ok) {
  std::lock_guard lock(mu_);
  entries_.push_back({std::string(to_string(p)), req.model, req.system, req.user,
                      std::string(outcome), ok});
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void Transcript::write_jsonl(const std::filesystem::path& path) const {
  std::vector<Entry> sorted;
  {
    std::lock_guard lock(mu_);
    sorted = entries_;
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Entry& a, const Entry& b) { return a.tie() < b.tie(); });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : sorted) {
    nlohmann::ordered_json j;
    j["purpose"] = e.purpose;
    j["model"] = e.model;
    j["system_hash"] = hex64(fnv1a64(e.system));
    j["user"] = e.user;
    j[e.ok ? "response" : "error"] = e.outcome;
    out << j.dump() << '\n';
  }
}

// ---- mock -----------------------------------------------------------------

MockSpec MockSpec::from_json(const nlohmann::json& j) {
  MockSpec m;
  auto mode = j.value("mode", std::string("identity"));
  if (mode == "identity") m.mode = Mode::Identity;
  else if (mode == "fixed") m.mode = Mode::Fixed;
  else if (mode == "canned") m.mode = Mode::Canned;
  else if (mode == "scripted") m.mode = Mode::Scripted;
  else if (mode == "unreachable") m.mode = Mode::Unreachable;
  else throw std::invalid_argument("unknown mock mode '" + mode + "'");
  m.fixed_text = j.value("text", std::string());
  if (j.contains("map")) m.canned = j.at("map").get<std::map<std::string, std::string>>();
  if (j.contains("script")) m.script = j.at("script").get<std::vector<std::string>>();
  return m;
}

ChatResponse MockBackend::send(const ChatRequest& req) {
  attempts_.fetch_add(1);
  ChatResponse resp;
  resp.model = req.model;
  switch (spec_.mode) {
    case MockSpec::Mode::Identity: {
      auto q = prompts::extract_quoted_question(req.user);
      resp.text = q.empty() ? req.user : q;
      break;
    }
    case MockSpec::Mode::Fixed:
      resp.text = spec_.fixed_text;
      break;
    case MockSpec::Mode::Canned: {
      auto it = spec_.canned.find(req.user);
      if (it == spec_.canned.end()) it = spec_.canned.find(prompts::extract_quoted_question(req.user));
      if (it != spec_.canned.end()) resp.text = it->second;
      break;
    }
    case MockSpec::Mode::Scripted: {
      std::lock_guard lock(mu_);
      if (cursor_ < spec_.script.size()) resp.text = spec_.script[cursor_++];
      break;
    }
    case MockSpec::Mode::Unreachable:
      throw LlmError(LlmError::Kind::Timeout, "mock endpoint unreachable");
  }
  if (trim_view(resp.text).empty()) {
    throw LlmError(LlmError::Kind::EmptyCompletion, "mock produced no completion");
  }
  return resp;
}

// ---- http -----------------------------------------------------------------

HttpBackend::HttpBackend(std::string url, std::string api_key, std::chrono::milliseconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
}

HttpBackend::~HttpBackend() = default;

nlohmann::json HttpBackend::request_body(const ChatRequest& req) {
  nlohmann::json messages = nlohmann::json::array();
  if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
  messages.push_back({{"role", "user"}, {"content", req.user}});
  return {{"model", req.model},
          {"messages", messages},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"stream", false}};
}

std::string HttpBackend::parse_response_body(std::string_view body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw LlmError(LlmError::Kind::MalformedCompletion, "response is not JSON");
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw LlmError(LlmError::Kind::EmptyCompletion, "response has no choices");
  }
  const auto& choice = j["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw LlmError(LlmError::Kind::EmptyCompletion, "choice has no message content");
  }
  auto text = choice["message"]["content"].get<std::string>();
  if (trim_view(text).empty()) throw LlmError(LlmError::Kind::EmptyCompletion, "empty completion");
  return text;
}

ChatResponse HttpBackend::send(const ChatRequest& req) {
  httplib::Client cli(base_);
  if (!cli.is_valid()) throw LlmError(LlmError::Kind::HttpError, "unsupported endpoint " + base_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto start = std::chrono::steady_clock::now();
  auto res = cli.Post(path_, headers, request_body(req).dump(), "application/json");
  auto latency = std::chrono::steady_clock::now() - start;
  if (!res) {
    throw LlmError(LlmError::Kind::Timeout,
                   "request to " + base_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    throw LlmError(LlmError::Kind::RateLimited, "rate limited by " + base_, 429);
  }
  if (res->status < 200 || res->status >= 300) {
    throw LlmError(LlmError::Kind::HttpError,
                   "HTTP " + std::to_string(res->status) + " from " + base_, res->status);
  }
  ChatResponse out;
  out.text = parse_response_body(res->body);
  out.latency = latency;
  out.model = req.model;
  return out;
}

// ---- client ---------------------------------------------------------------

void LlmClient::Gate::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void LlmClient::Gate::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<CallLedger> ledger,
                     RetryPolicy retry, std::size_t max_in_flight,
                     std::shared_ptr<Transcript> transcript)
    : backend_(std::move(backend)),
      ledger_(ledger ? std::move(ledger) : std::make_shared<CallLedger>()),
      retry_(retry),
      transcript_(std::move(transcript)),
      gate_(std::make_unique<Gate>(max_in_flight)) {
  if (!backend_) throw std::invalid_argument("LlmClient needs a backend");
  if (retry_.max_attempts < 1) retry_.max_attempts = 1;
}

ChatResponse LlmClient::complete(const ChatRequest& req, Purpose purpose) {
  req.validate();
  for (int attempt = 1;; ++attempt) {
    gate_->acquire();
    try {
      auto start = std::chrono::steady_clock::now();
      auto resp = backend_->send(req);
      gate_->release();
      if (resp.latency.count() <= 0) resp.latency = std::chrono::steady_clock::now() - start;
      ledger_->record_success(purpose, resp.latency);
      if (transcript_) transcript_->record(purpose, req, resp.text, true);
      return resp;
    } catch (const LlmError& e) {
      gate_->release();
      if (!e.retryable() || attempt >= retry_.max_attempts) {
        ledger_->record_failure(purpose);
        if (transcript_) {
          transcript_->record(purpose, req, std::string(to_string(e.kind())), false);
        }
        spdlog::debug("{} call failed after {} attempt(s): {}", to_string(purpose), attempt,
                      e.what());
        throw;
      }
      std::chrono::milliseconds backoff = retry_.base_backoff * (1LL << std::min(attempt - 1, 20));
      backoff = std::min(backoff, retry_.max_backoff);
      spdlog::debug("{} attempt {} failed ({}), retrying in {} ms", to_string(purpose), attempt,
                    e.what(), backoff.count());
      std::this_thread::sleep_for(backoff);
    }
  }
}

// ---- endpoint config ------------------------------------------------------

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
  EndpointConfig c;
  c.kind = j.value("kind", c.kind);
  if (c.kind != "mock" && c.kind != "http") {
    throw std::invalid_argument("endpoint kind must be 'mock' or 'http', got '" + c.kind + "'");
  }
  c.url = j.value("url", c.url);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
  c.concurrency = j.value("concurrency", c.concurrency);
  c.temperature = j.value("temperature", c.temperature);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  if (j.contains("mock")) c.mock = MockSpec::from_json(j.at("mock"));
  if (c.kind == "http" && c.url.empty()) throw std::invalid_argument("http endpoint needs a url");
  if (c.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (c.temperature < 0 || c.temperature > 2) throw std::invalid_argument("temperature must be in [0, 2]");
  return c;
}

nlohmann::ordered_json EndpointConfig::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  if (kind == "http") j["url"] = url;
  j["model"] = model;
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  j["max_attempts"] = max_attempts;
  j["concurrency"] = concurrency;
  return j;
}

std::shared_ptr<ChatBackend> EndpointConfig::make_backend() const {
  if (kind == "mock") return std::make_shared<MockBackend>(mock);
  std::string key;
  if (const char* v = std::getenv(api_key_env.c_str())) key = v;
  auto timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000));
  return std::make_shared<HttpBackend>(url, key, timeout);
}

RetryPolicy EndpointConfig::retry_policy() const {
  RetryPolicy p;
  p.max_attempts = max_attempts;
  p.base_backoff = std::chrono::milliseconds(backoff_ms);
  return p;
}

ChatRequest EndpointConfig::request(std::string system, std::string user) const {
  return ChatRequest{model, std::move(system), std::move(user), temperature, max_tokens};
}

std::string validate_question_line(std::string_view completion) {
  auto q = trim(completion);
  if (q.find('\n') != std::string::npos || q.find('\r') != std::string::npos) {
    throw LlmError(LlmError::Kind::MalformedCompletion, "completion spans several lines");
  }
  if (q.empty() || q.back() != '?') {
    throw LlmError(LlmError::Kind::MalformedCompletion, "completion does not end with '?'");
  }
  return q;
}

std::string direct_generate_question(const Triplet& t, LlmClient& client,
                                     const EndpointConfig& endpoint) {
  auto resp = client.complete(endpoint.request("", prompts::direct_generation_user(t)),
                              Purpose::DirectGenerate);
  return validate_question_line(resp.text);
}

}  // namespace kgquest
