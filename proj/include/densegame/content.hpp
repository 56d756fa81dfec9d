#pragma once

// Shipped text content: blackboard instructions, questionnaire wording and
// the item bank. The 13 questions are a reconstruction written for this
// project, not the original questionnaire; replace them via --bank and
// --strings files in the same record format.

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "densegame/records.hpp"
#include "densegame/stage.hpp"

namespace densegame {

inline constexpr std::string_view kDefaultStringsText = R"(# Localizable strings: string key=<key> text="<text>"

string key=board.PreTest text="Welcome! Before playing, answer each question and say how sure you are (1 = not sure at all, 4 = completely sure)."
string key=board.Training text="Training: pick up the cubes, put them on the balance and in the tank. Nothing is scored here, explore freely."
string key=board.C1 text="All cubes have the same volume. Compare them on the balance, then drop each cube in the water. Before each drop, make a prediction: will it sink, stay in the middle, or float? Correct prediction +2 points, wrong prediction -1 point."
string key=board.C2 text="All cubes have the same mass. Drop each cube in the water and make a prediction first: sink, stay in the middle, or float? Correct prediction +2 points, wrong prediction -1 point."
string key=board.C3 text="Two tanks: water and oil. Drop every cube in each tank and make a prediction before each drop: sink, stay in the middle, or float? Correct prediction +2 points, wrong prediction -1 point."
string key=board.Bonus text="Bonus level: water and quicksilver. No score and no prediction, just watch what the cubes do."
string key=board.PostTest text="Last step: the same questions again, in another order. Answer each one and say how sure you are."

string key=q01.prompt text="Two cubes have the same volume. Cube A is heavier than cube B. Which cube is denser?"
string key=q01.a text="Cube A"
string key=q01.b text="Cube B"
string key=q01.c text="They have the same density"
string key=q01.d text="It cannot be known"

string key=q02.prompt text="Two cubes have the same mass. Cube A is bigger than cube B. Which cube is denser?"
string key=q02.a text="Cube A"
string key=q02.b text="Cube B"
string key=q02.c text="They have the same density"
string key=q02.d text="It cannot be known"

string key=q03.prompt text="A wooden cube floats in water. It is cut into two halves. What do the halves do in water?"
string key=q03.a text="Both halves sink"
string key=q03.b text="Both halves float"
string key=q03.c text="The smaller half sinks"
string key=q03.d text="Both halves stay in the middle"

string key=q04.prompt text="What is the density of water, the reference for the density of solids?"
string key=q04.a text="1 g/cm3"
string key=q04.b text="0 g/cm3"
string key=q04.c text="10 g/cm3"
string key=q04.d text="It depends on the amount of water"

string key=q05.prompt text="A cube has a density of 0.8 g/cm3. What does it do in water?"
string key=q05.a text="It sinks"
string key=q05.b text="It stays in the middle"
string key=q05.c text="It floats"

string key=q06.prompt text="If both the mass and the volume of an object are doubled, its density..."
string key=q06.a text="doubles"
string key=q06.b text="is halved"
string key=q06.c text="does not change"
string key=q06.d text="is multiplied by four"

string key=q07.prompt text="A heavy tree trunk floats while a small pebble sinks. Why?"
string key=q07.a text="The trunk is less dense than water, the pebble is denser"
string key=q07.b text="Big objects always float"
string key=q07.c text="Light objects always sink"
string key=q07.d text="The trunk contains air only"

string key=q08.prompt text="A cube with exactly the density of water is released in the middle of a tank of water. What does it do?"
string key=q08.a text="It sinks to the bottom"
string key=q08.b text="It stays where it was released"
string key=q08.c text="It rises to the surface"

string key=q09.prompt text="A cube sinks in water. Oil is less dense than water. What does the cube do in oil?"
string key=q09.a text="It sinks"
string key=q09.b text="It floats"
string key=q09.c text="It stays in the middle"
string key=q09.d text="It cannot be known"

string key=q10.prompt text="A cube floats in water. What does it do in oil, which is less dense than water?"
string key=q10.a text="It always floats"
string key=q10.b text="It always sinks"
string key=q10.c text="It floats or sinks depending on its density"
string key=q10.d text="It always stays in the middle"

string key=q11.prompt text="An iron cube (7.9 g/cm3) is placed in quicksilver (13.5 g/cm3). What does it do?"
string key=q11.a text="It sinks"
string key=q11.b text="It floats"
string key=q11.c text="It stays in the middle"

string key=q12.prompt text="A cube of density 0.5 g/cm3 floats in water. Which part of its volume is under the surface?"
string key=q12.a text="None of it"
string key=q12.b text="A quarter"
string key=q12.c text="Half"
string key=q12.d text="All of it"

string key=q13.prompt text="True or false: a heavier object always sinks faster and deeper than a lighter one."
string key=q13.a text="True"
string key=q13.b text="False"
)";

inline constexpr std::string_view kDefaultItemBankText = R"(# Item bank: question id=<id> prompt_key=<key> options=<key,key,...> correct_index=<0-based>
# Reconstructed density questions (mass/volume/density relations, flotation,
# relative flotation in oil and quicksilver).

question id=Q01 prompt_key=q01.prompt options=q01.a,q01.b,q01.c,q01.d correct_index=0
question id=Q02 prompt_key=q02.prompt options=q02.a,q02.b,q02.c,q02.d correct_index=1
question id=Q03 prompt_key=q03.prompt options=q03.a,q03.b,q03.c,q03.d correct_index=1
question id=Q04 prompt_key=q04.prompt options=q04.a,q04.b,q04.c,q04.d correct_index=0
question id=Q05 prompt_key=q05.prompt options=q05.a,q05.b,q05.c       correct_index=2
question id=Q06 prompt_key=q06.prompt options=q06.a,q06.b,q06.c,q06.d correct_index=2
question id=Q07 prompt_key=q07.prompt options=q07.a,q07.b,q07.c,q07.d correct_index=0
question id=Q08 prompt_key=q08.prompt options=q08.a,q08.b,q08.c       correct_index=1
question id=Q09 prompt_key=q09.prompt options=q09.a,q09.b,q09.c,q09.d correct_index=0
question id=Q10 prompt_key=q10.prompt options=q10.a,q10.b,q10.c,q10.d correct_index=2
question id=Q11 prompt_key=q11.prompt options=q11.a,q11.b,q11.c       correct_index=1
question id=Q12 prompt_key=q12.prompt options=q12.a,q12.b,q12.c,q12.d correct_index=2
question id=Q13 prompt_key=q13.prompt options=q13.a,q13.b             correct_index=1
)";

class StringTable {
 public:
  static StringTable parse(std::istream& in) {
    StringTable t;
    for (const Record& r : parse_records(in)) {
      if (r.type() != "string") throw ParseError("unknown record type '" + r.type() + "'", r.line());
      r.expect_only({"key", "text"});
      if (!t.entries_.emplace(r.get("key"), r.get("text")).second)
        throw ParseError("duplicate string key '" + r.get("key") + "'", r.line());
    }
    return t;
  }

  static StringTable parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  static StringTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open strings file " + path);
    return parse(in);
  }

  static StringTable defaults() { return parse(kDefaultStringsText); }

  bool contains(std::string_view key) const { return entries_.find(std::string(key)) != entries_.end(); }

  const std::string& at(std::string_view key) const {
    auto it = entries_.find(std::string(key));
    if (it == entries_.end()) throw Error("missing string '" + std::string(key) + "'");
    return it->second;
  }

 private:
  std::map<std::string, std::string> entries_;
};

/// Blackboard text shown on entering `stage`.
inline const std::string& instructions_for(const StringTable& strings, StageId stage) {
  return strings.at("board." + std::string(to_string(stage)));
}

}  // namespace densegame
