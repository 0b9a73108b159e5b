#include "cubeforge/report.hpp"

namespace cubeforge {

void to_json(Json& j, const Witness& w) {
  j = Json{{"what", w.what}, {"ids", w.ids}, {"value", w.value}, {"bound", w.bound}};
}

void from_json(const Json& j, Witness& w) {
  j.at("what").get_to(w.what);
  j.at("ids").get_to(w.ids);
  j.at("value").get_to(w.value);
  j.at("bound").get_to(w.bound);
}

void to_json(Json& j, const CheckResult& c) {
  j = Json{{"name", c.name},       {"enforced", c.enforced},   {"checked", c.checked},
           {"violations", c.violations}, {"passed", c.passed()}, {"witnesses", c.witnesses},
           {"metrics", c.metrics}, {"note", c.note}};
}

void from_json(const Json& j, CheckResult& c) {
  j.at("name").get_to(c.name);
  j.at("enforced").get_to(c.enforced);
  j.at("checked").get_to(c.checked);
  j.at("violations").get_to(c.violations);
  j.at("witnesses").get_to(c.witnesses);
  c.metrics = j.value("metrics", Json::object());
  c.note = j.value("note", std::string{});
}

void to_json(Json& j, const VerificationReport& r) {
  j = Json{{"subject", r.subject}, {"passed", r.passed()}, {"checks", r.checks}};
}

void from_json(const Json& j, VerificationReport& r) {
  j.at("subject").get_to(r.subject);
  j.at("checks").get_to(r.checks);
}

}  // namespace cubeforge
