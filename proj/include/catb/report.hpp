#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace catb {

using Json = nlohmann::json;

struct PropertyResult {
  std::string name;
  bool pass = true;
  long cases = 0;
  double worst = 0.0;  // worst residual seen (0 for exact-equality properties)
  std::string note;
  std::string reproducer;  // inputs of the first failing case, in file formats
};

// Accumulates one property across the cases of a suite run.
class PropertyCheck {
 public:
  explicit PropertyCheck(std::string name) { r_.name = std::move(name); }

  void expect(bool ok, const std::string& repro = "") {
    ++r_.cases;
    if (!ok) fail(repro);
  }

  void bound(double value, double tol, const std::string& repro = "") {
    ++r_.cases;
    r_.worst = std::max(r_.worst, value);
    if (!(value <= tol)) fail(repro);
  }

  void note(const std::string& n) { r_.note = n; }
  bool passing() const { return r_.pass; }
  PropertyResult take() { return std::move(r_); }

 private:
  void fail(const std::string& repro) {
    r_.pass = false;
    if (r_.reproducer.empty()) r_.reproducer = repro;
  }
  PropertyResult r_;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  long cases = 0;
  double wall_ms = 0.0;
  std::vector<PropertyResult> properties;

  bool pass() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
  }

  Json to_json(bool include_timing = true) const {
    Json props = Json::array();
    for (const auto& p : properties) {
      Json jp{{"name", p.name}, {"pass", p.pass}, {"cases", p.cases}, {"worst", p.worst}};
      if (!p.note.empty()) jp["note"] = p.note;
      if (!p.reproducer.empty()) jp["reproducer"] = p.reproducer;
      props.push_back(std::move(jp));
    }
    Json out{{"suite", suite}, {"seed", seed},        {"cases", cases},
             {"pass", pass()}, {"properties", props}};
    if (include_timing) out["wall_ms"] = wall_ms;
    return out;
  }
};

}  // namespace catb
