#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <json.hpp>

namespace cubeforge {

using Json = nlohmann::json;

struct Witness {
  std::string what;
  std::vector<std::int64_t> ids;
  double value = 0.0;
  double bound = 0.0;

  bool operator==(const Witness&) const = default;
};

/// Outcome of one named property check. Unenforced checks are reported but
/// never fail the enclosing report.
struct CheckResult {
  static constexpr std::size_t kWitnessCap = 8;

  std::string name;
  bool enforced = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<Witness> witnesses;
  Json metrics = Json::object();
  std::string note;

  bool passed() const noexcept { return violations == 0; }
  void fail(Witness w) {
    ++violations;
    if (witnesses.size() < kWitnessCap) witnesses.push_back(std::move(w));
  }

  bool operator==(const CheckResult&) const = default;
};

struct VerificationReport {
  std::string subject;
  // Deque: references returned by add() stay valid across later adds.
  std::deque<CheckResult> checks;

  CheckResult& add(std::string name, bool enforced = true) {
    CheckResult& c = checks.emplace_back();
    c.name = std::move(name);
    c.enforced = enforced;
    return c;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  /// True iff every enforced check has zero violations.
  bool passed() const noexcept {
    for (const auto& c : checks)
      if (c.enforced && !c.passed()) return false;
    return true;
  }
  void merge(const VerificationReport& other, const std::string& prefix = {}) {
    for (CheckResult c : other.checks) {
      if (!prefix.empty()) c.name = prefix + c.name;
      checks.push_back(std::move(c));
    }
  }

  bool operator==(const VerificationReport&) const = default;
};

void to_json(Json& j, const Witness& w);
void from_json(const Json& j, Witness& w);
void to_json(Json& j, const CheckResult& c);
void from_json(const Json& j, CheckResult& c);
void to_json(Json& j, const VerificationReport& r);
void from_json(const Json& j, VerificationReport& r);

}  // namespace cubeforge
