#pragma once

// Cube catalogs and liquids per stage, loadable from record files:
//
//   liquid id=water name=Water density_g_cm3=1.000
//   cube stage=C1 id=A volume_cm3=1000 mass_g=500 [dots=5]
//
// Cube records may target Training, C1 or C2. C3 and Bonus reuse the C1 set.

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "densegame/physics.hpp"
#include "densegame/records.hpp"
#include "densegame/stage.hpp"

namespace densegame {

struct Tank {
  std::string id;
  Liquid liquid;

  friend bool operator==(const Tank&, const Tank&) = default;
};

struct CubeCatalog {
  StageId stage = StageId::C1;
  std::vector<Cube> cubes;

  const Cube* find(std::string_view id) const {
    for (const auto& c : cubes)
      if (c.id == id) return &c;
    return nullptr;
  }

  friend bool operator==(const CubeCatalog&, const CubeCatalog&) = default;
};

struct StageSetup {
  CubeCatalog catalog;
  std::vector<Tank> tanks;

  const Tank* find_tank(std::string_view id) const {
    for (const auto& t : tanks)
      if (t.id == id) return &t;
    return nullptr;
  }
};

inline constexpr std::string_view kDefaultCatalogText = R"(# Default cube catalog and liquids.
#
# C1: equal volumes, distinct masses. C2: equal masses, distinct volumes.
# C3 and the bonus stage reuse the C1 cubes.

liquid id=water       name=Water       density_g_cm3=1.000
liquid id=oil         name=Oil         density_g_cm3=0.920
liquid id=quicksilver name=Quicksilver density_g_cm3=13.534

cube stage=Training id=T1 volume_cm3=1000 mass_g=300
cube stage=Training id=T2 volume_cm3=1000 mass_g=1500

cube stage=C1 id=A volume_cm3=1000 mass_g=500
cube stage=C1 id=B volume_cm3=1000 mass_g=920
cube stage=C1 id=C volume_cm3=1000 mass_g=1000
cube stage=C1 id=D volume_cm3=1000 mass_g=1200

cube stage=C2 id=E volume_cm3=512  mass_g=800
cube stage=C2 id=F volume_cm3=800  mass_g=800
cube stage=C2 id=G volume_cm3=1000 mass_g=800
)";

class Catalog {
 public:
  static Catalog parse(std::istream& in) {
    Catalog cat;
    for (const Record& r : parse_records(in)) {
      if (r.type() == "liquid") {
        r.expect_only({"id", "name", "density_g_cm3"});
        Liquid l = make_liquid(r.get("id"), r.find("name").value_or(r.get("id")), r.get_decimal("density_g_cm3"));
        if (cat.find_liquid(l.id)) throw ParseError("duplicate liquid '" + l.id + "'", r.line());
        cat.liquids_.push_back(std::move(l));
      } else if (r.type() == "cube") {
        r.expect_only({"stage", "id", "volume_cm3", "mass_g", "dots"});
        StageId stage;
        try {
          stage = parse_stage(r.get("stage"));
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          throw ParseError(e.what(), r.line());
        }
        if (stage != StageId::Training && stage != StageId::C1 && stage != StageId::C2)
          throw ParseError("cube records may only target Training, C1 or C2", r.line());
        std::optional<int> dots;
        if (auto d = r.find("dots")) dots = static_cast<int>(parse_integer(*d, r.line()));
        Cube c;
        try {
          c = make_cube(r.get("id"), r.get_decimal("volume_cm3"), r.get_decimal("mass_g"), dots);
        } catch (const ParseError&) {
          throw;
        } catch (const Error& e) {
          throw ParseError(e.what(), r.line());
        }
        auto& list = cat.cubes_[stage];
        for (const auto& existing : list)
          if (existing.id == c.id) throw ParseError("duplicate cube '" + c.id + "'", r.line());
        list.push_back(std::move(c));
      } else {
        throw ParseError("unknown record type '" + r.type() + "'", r.line());
      }
    }
    cat.validate();
    return cat;
  }

  static Catalog parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  static Catalog load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open catalog file " + path);
    return parse(in);
  }

  static Catalog defaults() { return parse(kDefaultCatalogText); }

  const std::vector<Liquid>& liquids() const { return liquids_; }

  const Liquid* find_liquid(std::string_view id) const {
    for (const auto& l : liquids_)
      if (l.id == id) return &l;
    return nullptr;
  }

  const Liquid& liquid(std::string_view id) const {
    if (const Liquid* l = find_liquid(id)) return *l;
    throw Error("catalog has no liquid '" + std::string(id) + "'");
  }

  /// Cubes and tanks for a playable stage.
  StageSetup catalog_for(StageId stage) const {
    auto cubes_of = [&](StageId s) {
      auto it = cubes_.find(s);
      return it == cubes_.end() ? std::vector<Cube>{} : it->second;
    };
    auto tank = [&](std::string_view id) { return Tank{std::string(id), liquid(id)}; };
    switch (stage) {
      case StageId::Training: return {{stage, cubes_of(StageId::Training)}, {tank("water")}};
      case StageId::C1: return {{stage, cubes_of(StageId::C1)}, {tank("water")}};
      case StageId::C2: return {{stage, cubes_of(StageId::C2)}, {tank("water")}};
      case StageId::C3: return {{stage, cubes_of(StageId::C1)}, {tank("water"), tank("oil")}};
      case StageId::Bonus: return {{stage, cubes_of(StageId::C1)}, {tank("water"), tank("quicksilver")}};
      case StageId::PreTest:
      case StageId::PostTest: break;
    }
    throw Error("stage " + std::string(to_string(stage)) + " has no cube catalog");
  }

  /// Every cube across all stages, each once.
  std::vector<Cube> all_cubes() const {
    std::vector<Cube> out;
    for (const auto& [stage, list] : cubes_) out.insert(out.end(), list.begin(), list.end());
    return out;
  }

  /// Scored (cube, tank) trials over C1..C3.
  std::size_t scored_trial_count() const {
    std::size_t n = 0;
    for (StageId s : {StageId::C1, StageId::C2, StageId::C3}) {
      const auto setup = catalog_for(s);
      n += setup.catalog.cubes.size() * setup.tanks.size();
    }
    return n;
  }

  void validate() const {
    for (std::string_view id : {"water", "oil", "quicksilver"})
      if (!find_liquid(id)) throw Error("catalog is missing liquid '" + std::string(id) + "'");
    if (liquid("water").density != 1.0) throw Error("water must have density 1.0 (reference)");
    if (liquid("oil").density >= 1.0) throw Error("oil must be less dense than water");

    const auto c1 = cubes_of_or_throw(StageId::C1);
    const auto c2 = cubes_of_or_throw(StageId::C2);
    if (cubes_.count(StageId::Training) == 0 || cubes_.at(StageId::Training).empty())
      throw Error("Training needs at least one cube");

    std::set<double> masses, volumes;
    for (const auto& c : c1) {
      if (c.volume != c1.front().volume) throw Error("C1 cubes must share one volume");
      if (!masses.insert(c.mass).second) throw Error("C1 cube masses must be pairwise distinct");
    }
    for (const auto& c : c2) {
      if (c.mass != c2.front().mass) throw Error("C2 cubes must share one mass");
      if (!volumes.insert(c.volume).second) throw Error("C2 cube volumes must be pairwise distinct");
    }

    std::set<std::string> ids;
    const auto all = all_cubes();
    for (const auto& c : all)
      if (!ids.insert(c.id).second) throw Error("cube id '" + c.id + "' used in more than one stage");
    for (const auto& a : all)
      for (const auto& b : all)
        if (density(a) < density(b) && a.dot_level > b.dot_level)
          throw Error("dot levels must not decrease with density (" + a.id + " vs " + b.id + ")");

    const auto& water = liquid("water");
    const auto& oil = liquid("oil");
    const bool discriminates = std::any_of(c1.begin(), c1.end(), [&](const Cube& c) {
      return classify_flotation(c, water, kGameplaySuspendTolerance) !=
             classify_flotation(c, oil, kGameplaySuspendTolerance);
    });
    if (!discriminates) throw Error("C1 needs a cube that behaves differently in water and oil");
  }

 private:
  const std::vector<Cube>& cubes_of_or_throw(StageId s) const {
    auto it = cubes_.find(s);
    if (it == cubes_.end() || it->second.empty()) throw Error(std::string(to_string(s)) + " needs at least one cube");
    return it->second;
  }

  std::vector<Liquid> liquids_;
  std::map<StageId, std::vector<Cube>> cubes_;
};

/// Roberval balance reading.
enum class BalanceReading { LeftHeavier, Balanced, RightHeavier };

inline std::string_view to_string(BalanceReading b) {
  switch (b) {
    case BalanceReading::LeftHeavier: return "LeftHeavier";
    case BalanceReading::Balanced: return "Balanced";
    case BalanceReading::RightHeavier: return "RightHeavier";
  }
  throw Error("invalid BalanceReading");
}

inline BalanceReading weigh(const Cube& left, const Cube& right) {
  if (left.mass > right.mass) return BalanceReading::LeftHeavier;
  if (left.mass < right.mass) return BalanceReading::RightHeavier;
  return BalanceReading::Balanced;
}

}  // namespace densegame
