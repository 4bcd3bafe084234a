//
// Project S2G - Copyright 2026 S2G Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "s2g/pattern.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "s2g/error.hpp"
#include "s2g/util.hpp"

namespace s2g {

namespace {

AtomTest make_prim(AtomTest::Prim prim) {
  AtomTest t;
  t.op = AtomTest::Op::Prim;
  t.prim = prim;
  return t;
}

AtomTest make_junction(AtomTest::Op op, std::vector<AtomTest> kids) {
  if (kids.size() == 1) return std::move(kids.front());
  AtomTest t;
  t.op = op;
  for (auto &k : kids) {
    if (k.op == op) {
      for (auto &g : k.kids) t.kids.push_back(std::move(g));
    } else {
      t.kids.push_back(std::move(k));
    }
  }
  return t;
}

// Ring-closure digit that is open but not yet paired.
struct OpenClosure {
  std::size_t atom = 0;
  BondTest test = BondTest::Default;
  bool explicit_bond = false;
  std::size_t at_byte = 0;
};

class PatternParser {
 public:
  PatternParser(const std::string &text, std::size_t begin, std::size_t end,
                bool inside_recursion)
      : text_(text), pos_(begin), end_(end), inside_recursion_(inside_recursion) {}

  Pattern run() {
    Pattern p;
    long prev = -1;
    bool have_pending = false;
    BondTest pending = BondTest::Default;
    std::vector<std::pair<long, std::size_t>> branch_stack;  // (prev, atom count)
    std::map<char, OpenClosure> open_closures;

    while (pos_ < end_) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0) fail("branch before any atom", pos_);
        if (have_pending) fail("bond symbol before '('", pos_);
        branch_stack.emplace_back(prev, p.atoms.size());
        ++pos_;
      } else if (c == ')') {
        if (branch_stack.empty()) fail("unmatched ')'", pos_);
        if (have_pending) fail("dangling bond symbol", pos_);
        if (p.atoms.size() == branch_stack.back().second) fail("empty branch", pos_);
        prev = branch_stack.back().first;
        branch_stack.pop_back();
        ++pos_;
      } else if (is_bond_char(c)) {
        if (have_pending) fail("two bond symbols in a row", pos_);
        have_pending = true;
        pending = bond_test_for(c);
        ++pos_;
      } else if (c >= '1' && c <= '9') {
        if (prev < 0) fail("ring closure before any atom", pos_);
        auto it = open_closures.find(c);
        if (it == open_closures.end()) {
          open_closures[c] = {static_cast<std::size_t>(prev), pending, have_pending, pos_};
        } else {
          close_ring(p, it->second, static_cast<std::size_t>(prev), pending, have_pending);
          open_closures.erase(it);
        }
        have_pending = false;
        pending = BondTest::Default;
        ++pos_;
      } else if (c == '[' || is_bare_atom_start(c)) {
        const AtomTest atom = (c == '[') ? parse_bracket_atom() : parse_bare_atom();
        p.atoms.push_back(atom);
        const std::size_t idx = p.atoms.size() - 1;
        if (prev >= 0) {
          p.bonds.push_back({static_cast<std::size_t>(prev), idx, pending});
        } else if (have_pending) {
          fail("bond symbol before the first atom", pos_);
        }
        prev = static_cast<long>(idx);
        have_pending = false;
        pending = BondTest::Default;
      } else {
        fail(std::string("unsupported SMARTS construct '") + c + "'", pos_);
      }
    }

    if (p.atoms.empty()) fail("empty pattern", pos_);
    if (have_pending) fail("dangling bond symbol at end of pattern", pos_);
    if (!branch_stack.empty()) fail("unclosed branch", pos_);
    if (!open_closures.empty()) {
      const auto &[digit, open] = *open_closures.begin();
      fail(std::string("unclosed ring closure '") + digit + "'", open.at_byte);
    }
    require_connected(p);
    return p;
  }

 private:
  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~';
  }

  static BondTest bond_test_for(char c) {
    switch (c) {
      case '-': return BondTest::Single;
      case '=': return BondTest::Double;
      case '#': return BondTest::Triple;
      case ':': return BondTest::Aromatic;
      default: return BondTest::Any;
    }
  }

  static bool is_bare_atom_start(char c) {
    return c == '*' || std::isupper(static_cast<unsigned char>(c)) ||
           c == 'c' || c == 'n' || c == 'o' || c == 's';
  }

  void close_ring(Pattern &p, const OpenClosure &open, std::size_t atom,
                  BondTest pending, bool have_pending) {
    if (open.atom == atom) fail("ring closure bonds an atom to itself", pos_);
    BondTest test = BondTest::Default;
    if (open.explicit_bond && have_pending && open.test != pending) {
      fail("conflicting bond symbols on ring closure", pos_);
    }
    if (open.explicit_bond) test = open.test;
    if (have_pending) test = pending;
    p.bonds.push_back({open.atom, atom, test});
  }

  [[noreturn]] void fail(const std::string &what, std::size_t at) const {
    std::ostringstream os;
    os << "pattern \"" << text_ << "\": " << what << " at byte " << at;
    throw ParseError(os.str());
  }

  char peek() const { return pos_ < end_ ? text_[pos_] : '\0'; }

  // ---- bare (unbracketed) atoms -------------------------------------------

  AtomTest parse_bare_atom() {
    const std::size_t at = pos_;
    if (peek() == '*') {
      ++pos_;
      return make_prim(AtomTest::Prim::AnyAtom);
    }
    static constexpr std::array<const char *, 5> kTwoLetter = {"Cl", "Br", "Si", "Se", "As"};
    for (const char *sym : kTwoLetter) {
      if (text_.compare(pos_, 2, sym) == 0) {
        pos_ += 2;
        return element_prim(sym, false);
      }
    }
    const char c = peek();
    if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'F' || c == 'P' || c == 'S') {
      ++pos_;
      return element_prim(std::string(1, c).c_str(), false);
    }
    if (c == 'c' || c == 'n' || c == 'o' || c == 's') {
      ++pos_;
      const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return element_prim(std::string(1, upper).c_str(), true);
    }
    fail(std::string("unknown atom symbol '") + c + "'", at);
  }

  AtomTest element_prim(const char *symbol, bool aromatic) {
    AtomTest t = make_prim(AtomTest::Prim::Element);
    t.element = element_from_symbol(symbol);
    t.require_aromatic = aromatic;
    t.require_aliphatic = !aromatic;
    return t;
  }

  // ---- bracket atom expressions -------------------------------------------

  AtomTest parse_bracket_atom() {
    ++pos_;  // '['
    AtomTest expr = parse_expr();
    const char c = peek();
    if (c != ']') {
      if (c == '+' || c == '-' || c == '@' ||
          std::isdigit(static_cast<unsigned char>(c))) {
        fail(std::string("unsupported SMARTS construct '") + c + "'", pos_);
      }
      fail("expected ']'", pos_);
    }
    ++pos_;
    return expr;
  }

  AtomTest parse_expr() {
    std::vector<AtomTest> kids{parse_or()};
    while (peek() == ';') {
      ++pos_;
      kids.push_back(parse_or());
    }
    return make_junction(AtomTest::Op::And, std::move(kids));
  }

  AtomTest parse_or() {
    std::vector<AtomTest> kids{parse_and()};
    while (peek() == ',') {
      ++pos_;
      kids.push_back(parse_and());
    }
    return make_junction(AtomTest::Op::Or, std::move(kids));
  }

  AtomTest parse_and() {
    std::vector<AtomTest> kids{parse_not()};
    while (true) {
      if (peek() == '&') {
        ++pos_;
        kids.push_back(parse_not());
      } else if (starts_primitive(peek())) {
        kids.push_back(parse_not());
      } else {
        break;
      }
    }
    return make_junction(AtomTest::Op::And, std::move(kids));
  }

  static bool starts_primitive(char c) {
    return c == '!' || c == '#' || c == '$' || c == '*' ||
           std::isalpha(static_cast<unsigned char>(c)) != 0;
  }

  AtomTest parse_not() {
    if (peek() == '!') {
      ++pos_;
      AtomTest t;
      t.op = AtomTest::Op::Not;
      t.kids.push_back(parse_primitive());
      return t;
    }
    return parse_primitive();
  }

  AtomTest parse_primitive() {
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '#') {
      ++pos_;
      const int n = parse_digits("atomic number");
      if (n < 1 || n > 118) fail("atomic number out of range", at);
      AtomTest t = make_prim(AtomTest::Prim::AtomicNumber);
      t.number = n;
      return t;
    }
    if (c == '$') return parse_recursive();
    if (c == '*') {
      ++pos_;
      return make_prim(AtomTest::Prim::AnyAtom);
    }
    if (c == 'X') {
      ++pos_;
      AtomTest t = make_prim(AtomTest::Prim::Connections);
      t.number = parse_optional_digits(1);
      return t;
    }
    if (c == 'H') {
      ++pos_;
      AtomTest t = make_prim(AtomTest::Prim::HydrogenCount);
      t.number = parse_optional_digits(1);
      return t;
    }
    static constexpr std::array<const char *, 5> kTwoLetter = {"Cl", "Br", "Si", "Se", "As"};
    for (const char *sym : kTwoLetter) {
      if (text_.compare(pos_, 2, sym) == 0) {
        pos_ += 2;
        return element_prim(sym, false);
      }
    }
    if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'F' || c == 'P' || c == 'S') {
      ++pos_;
      return element_prim(std::string(1, c).c_str(), false);
    }
    if (c == 'c' || c == 'n' || c == 'o' || c == 's') {
      ++pos_;
      const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return element_prim(std::string(1, upper).c_str(), true);
    }
    fail(std::string("unsupported SMARTS construct '") + c + "'", at);
  }

  AtomTest parse_recursive() {
    const std::size_t at = pos_;
    if (inside_recursion_) {
      fail("recursive environments nest at most one level", at);
    }
    ++pos_;  // '$'
    if (peek() != '(') fail("expected '(' after '$'", pos_);
    ++pos_;
    const std::size_t body_begin = pos_;
    int depth = 1;
    while (pos_ < end_ && depth > 0) {
      if (text_[pos_] == '(') ++depth;
      if (text_[pos_] == ')') --depth;
      ++pos_;
    }
    if (depth != 0) fail("unterminated recursive environment", at);
    const std::size_t body_end = pos_ - 1;
    if (body_end == body_begin) fail("empty recursive environment", at);
    PatternParser inner(text_, body_begin, body_end, true);
    AtomTest t = make_prim(AtomTest::Prim::Recursive);
    t.env = std::make_shared<const Pattern>(inner.run());
    return t;
  }

  int parse_digits(const char *what) {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      fail(std::string("expected ") + what, pos_);
    }
    int n = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      n = n * 10 + (peek() - '0');
      ++pos_;
      if (n > 1000) fail("number too large", pos_);
    }
    return n;
  }

  int parse_optional_digits(int fallback) {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) return fallback;
    return parse_digits("count");
  }

  void require_connected(const Pattern &p) const {
    std::vector<std::vector<std::size_t>> adj(p.atoms.size());
    for (const auto &b : p.bonds) {
      adj[b.a].push_back(b.b);
      adj[b.b].push_back(b.a);
    }
    std::vector<bool> seen(p.atoms.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    if (reached != p.atoms.size()) fail("pattern graph is disconnected", pos_);
  }

  const std::string &text_;
  std::size_t pos_;
  std::size_t end_;
  bool inside_recursion_;
};

// ---- matching --------------------------------------------------------------

bool anchored_match_exists(const Pattern &p, const MatchContext &ctx, std::size_t anchor);

struct SearchStep {
  std::size_t patom = 0;
  long parent = -1;  // pattern atom already assigned, -1 for the root
  BondTest parent_test = BondTest::Default;
  std::vector<std::pair<std::size_t, BondTest>> extra;  // other assigned neighbours
};

std::vector<SearchStep> build_plan(const Pattern &p) {
  std::vector<std::vector<std::pair<std::size_t, BondTest>>> adj(p.atoms.size());
  for (const auto &b : p.bonds) {
    adj[b.a].emplace_back(b.b, b.test);
    adj[b.b].emplace_back(b.a, b.test);
  }
  std::vector<SearchStep> plan;
  std::vector<long> placed_at(p.atoms.size(), -1);
  std::vector<std::size_t> queue{0};
  placed_at[0] = 0;
  plan.push_back({0, -1, BondTest::Default, {}});
  std::size_t head = 0;
  while (head < queue.size()) {
    const std::size_t u = queue[head++];
    for (const auto &[v, test] : adj[u]) {
      if (placed_at[v] >= 0) continue;
      placed_at[v] = static_cast<long>(plan.size());
      plan.push_back({v, static_cast<long>(u), test, {}});
      queue.push_back(v);
    }
  }
  for (auto &step : plan) {
    if (step.parent < 0) continue;
    for (const auto &[v, test] : adj[step.patom]) {
      if (static_cast<long>(v) == step.parent) continue;
      if (placed_at[v] < placed_at[step.patom]) step.extra.emplace_back(v, test);
    }
  }
  return plan;
}

struct Searcher {
  const Pattern &p;
  const MatchContext &ctx;
  std::vector<SearchStep> plan;
  std::vector<long> assignment;
  std::vector<bool> used;
  bool first_only = false;
  long anchor = -1;
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> found;

  Searcher(const Pattern &pattern, const MatchContext &context)
      : p(pattern), ctx(context), plan(build_plan(pattern)),
        assignment(pattern.atoms.size(), -1),
        used(context.graph->atoms.size(), false) {}

  bool accepts(const SearchStep &step, std::size_t cand) const {
    if (used[cand]) return false;
    if (!eval_atom_test(p.atoms[step.patom], ctx, cand)) return false;
    if (step.parent >= 0) {
      const std::size_t from = static_cast<std::size_t>(assignment[step.parent]);
      const Bond *b = ctx.graph->find_bond(from, cand);
      if (b == nullptr || !eval_bond_test(step.parent_test, *b)) return false;
    }
    for (const auto &[other, test] : step.extra) {
      const std::size_t from = static_cast<std::size_t>(assignment[other]);
      const Bond *b = ctx.graph->find_bond(from, cand);
      if (b == nullptr || !eval_bond_test(test, *b)) return false;
    }
    return true;
  }

  bool extend(std::size_t k) {
    if (k == plan.size()) {
      std::vector<std::size_t> key;
      key.reserve(assignment.size());
      for (long a : assignment) key.push_back(static_cast<std::size_t>(a));
      std::sort(key.begin(), key.end());
      if (found.find(key) == found.end()) {
        std::vector<std::size_t> mapping(assignment.begin(), assignment.end());
        found.emplace(std::move(key), std::move(mapping));
      }
      return first_only;
    }
    const SearchStep &step = plan[k];
    if (step.parent < 0) {
      if (anchor >= 0) {
        return try_candidate(step, k, static_cast<std::size_t>(anchor));
      }
      for (std::size_t cand = 0; cand < ctx.graph->atoms.size(); ++cand) {
        if (try_candidate(step, k, cand)) return true;
      }
      return false;
    }
    const std::size_t from = static_cast<std::size_t>(assignment[step.parent]);
    for (std::size_t cand : ctx.adjacency[from]) {
      if (try_candidate(step, k, cand)) return true;
    }
    return false;
  }

  bool try_candidate(const SearchStep &step, std::size_t k, std::size_t cand) {
    if (!accepts(step, cand)) return false;
    assignment[step.patom] = static_cast<long>(cand);
    used[cand] = true;
    const bool stop = extend(k + 1);
    used[cand] = false;
    assignment[step.patom] = -1;
    return stop;
  }
};

bool anchored_match_exists(const Pattern &p, const MatchContext &ctx, std::size_t anchor) {
  Searcher s(p, ctx);
  s.first_only = true;
  s.anchor = static_cast<long>(anchor);
  return s.extend(0);
}

}  // namespace

Pattern parse_pattern(const std::string &text) {
  PatternParser parser(text, 0, text.size(), false);
  Pattern p = parser.run();
  p.text = text;
  return p;
}

MatchContext::MatchContext(const MolecularGraph &g)
    : graph(&g), adjacency(g.adjacency()),
      hydrogen_count(g.atoms.size(), 0),
      aromatic_atom(g.atoms.size(), false) {
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    for (std::size_t j : adjacency[i]) {
      if (g.atoms[j] == Element::H) ++hydrogen_count[i];
    }
  }
  for (const auto &b : g.bonds) {
    if (b.aromatic) {
      aromatic_atom[b.i] = true;
      aromatic_atom[b.j] = true;
    }
  }
}

bool eval_atom_test(const AtomTest &test, const MatchContext &ctx, std::size_t atom) {
  switch (test.op) {
    case AtomTest::Op::And:
      for (const auto &k : test.kids) {
        if (!eval_atom_test(k, ctx, atom)) return false;
      }
      return true;
    case AtomTest::Op::Or:
      for (const auto &k : test.kids) {
        if (eval_atom_test(k, ctx, atom)) return true;
      }
      return false;
    case AtomTest::Op::Not:
      return !eval_atom_test(test.kids.front(), ctx, atom);
    case AtomTest::Op::Prim:
      break;
  }
  switch (test.prim) {
    case AtomTest::Prim::Element:
      if (ctx.graph->atoms[atom] != test.element) return false;
      if (test.require_aromatic && !ctx.aromatic_atom[atom]) return false;
      if (test.require_aliphatic && ctx.aromatic_atom[atom]) return false;
      return true;
    case AtomTest::Prim::AtomicNumber:
      return atomic_number(ctx.graph->atoms[atom]) == test.number;
    case AtomTest::Prim::AnyAtom:
      return true;
    case AtomTest::Prim::Connections:
      return static_cast<int>(ctx.adjacency[atom].size()) == test.number;
    case AtomTest::Prim::HydrogenCount:
      return ctx.hydrogen_count[atom] == test.number;
    case AtomTest::Prim::Recursive:
      return anchored_match_exists(*test.env, ctx, atom);
  }
  return false;
}

bool eval_bond_test(BondTest test, const Bond &bond) {
  switch (test) {
    case BondTest::Default:
      return bond.aromatic || (bond.order == 1 && !bond.aromatic);
    case BondTest::Single:
      return bond.order == 1 && !bond.aromatic;
    case BondTest::Double:
      return bond.order == 2 && !bond.aromatic;
    case BondTest::Triple:
      return bond.order == 3 && !bond.aromatic;
    case BondTest::Aromatic:
      return bond.aromatic;
    case BondTest::Any:
      return true;
  }
  return false;
}

std::vector<std::vector<std::size_t>> match_pattern(const Pattern &pattern,
                                                    const MatchContext &ctx) {
  Searcher s(pattern, ctx);
  s.extend(0);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(s.found.size());
  for (auto &[key, mapping] : s.found) out.push_back(mapping);
  return out;
}

std::vector<std::vector<std::size_t>> match_pattern(const Pattern &pattern,
                                                    const MolecularGraph &graph) {
  MatchContext ctx(graph);
  return match_pattern(pattern, ctx);
}

bool matches_anywhere(const Pattern &pattern, const MatchContext &ctx) {
  Searcher s(pattern, ctx);
  s.first_only = true;
  return s.extend(0);
}

// ---- canonical text ---------------------------------------------------------

namespace {

std::string bond_token(BondTest test) {
  switch (test) {
    case BondTest::Default: return "";
    case BondTest::Single: return "-";
    case BondTest::Double: return "=";
    case BondTest::Triple: return "#";
    case BondTest::Aromatic: return ":";
    case BondTest::Any: return "~";
  }
  return "";
}

std::string prim_token(const AtomTest &t) {
  switch (t.prim) {
    case AtomTest::Prim::Element: {
      std::string sym = element_symbol(t.element);
      if (t.require_aromatic) sym = lowercase(sym);
      return sym;
    }
    case AtomTest::Prim::AtomicNumber:
      return "#" + std::to_string(t.number);
    case AtomTest::Prim::AnyAtom:
      return "*";
    case AtomTest::Prim::Connections:
      return "X" + std::to_string(t.number);
    case AtomTest::Prim::HydrogenCount:
      return "H" + std::to_string(t.number);
    case AtomTest::Prim::Recursive:
      return "$(" + normalize_pattern(*t.env) + ")";
  }
  return "*";
}

std::string not_text(const AtomTest &t) {
  if (t.op == AtomTest::Op::Not) return "!" + prim_token(t.kids.front());
  return prim_token(t);
}

std::string and_text(const AtomTest &t) {
  if (t.op != AtomTest::Op::And) return not_text(t);
  std::string out;
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    if (i > 0) out += "&";
    out += not_text(t.kids[i]);
  }
  return out;
}

std::string or_text(const AtomTest &t) {
  if (t.op != AtomTest::Op::Or) return and_text(t);
  std::string out;
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    if (i > 0) out += ",";
    out += and_text(t.kids[i]);
  }
  return out;
}

std::string expr_text(const AtomTest &t) {
  if (t.op != AtomTest::Op::And) return or_text(t);
  std::string out;
  for (std::size_t i = 0; i < t.kids.size(); ++i) {
    if (i > 0) out += ";";
    out += or_text(t.kids[i]);
  }
  return out;
}

struct Emitter {
  const Pattern &p;
  std::vector<std::vector<std::pair<std::size_t, BondTest>>> adj;
  std::vector<bool> visited;
  std::vector<std::vector<std::pair<std::size_t, BondTest>>> tree_kids;
  struct RingMark {
    int digit;
    BondTest test;
    bool opener;
  };
  std::vector<std::vector<RingMark>> rings;
  std::set<std::pair<std::size_t, std::size_t>> tree_edges;
  int next_digit = 1;

  explicit Emitter(const Pattern &pattern)
      : p(pattern), adj(pattern.atoms.size()), visited(pattern.atoms.size(), false),
        tree_kids(pattern.atoms.size()), rings(pattern.atoms.size()) {
    for (const auto &b : p.bonds) {
      adj[b.a].emplace_back(b.b, b.test);
      adj[b.b].emplace_back(b.a, b.test);
    }
  }

  void classify(std::size_t u, long parent) {
    visited[u] = true;
    for (const auto &[v, test] : adj[u]) {
      const auto edge = std::minmax(u, v);
      if (!visited[v]) {
        tree_edges.insert({edge.first, edge.second});
        tree_kids[u].emplace_back(v, test);
        classify(v, static_cast<long>(u));
        continue;
      }
      if (static_cast<long>(v) == parent) continue;
      if (tree_edges.count({edge.first, edge.second}) > 0) continue;
      if (already_ringed(u, v)) continue;
      if (next_digit > 9) {
        throw Error("pattern needs more than nine ring-closure digits");
      }
      const int d = next_digit++;
      rings[v].push_back({d, test, true});
      rings[u].push_back({d, test, false});
      ring_pairs.insert({edge.first, edge.second});
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> ring_pairs;

  bool already_ringed(std::size_t u, std::size_t v) const {
    const auto edge = std::minmax(u, v);
    return ring_pairs.count({edge.first, edge.second}) > 0;
  }

  std::string emit(std::size_t u) const {
    std::string out = "[" + expr_text(p.atoms[u]) + "]";
    for (const auto &mark : rings[u]) {
      if (mark.opener) out += bond_token(mark.test);
      out += std::to_string(mark.digit);
    }
    const auto &kids = tree_kids[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const std::string piece = bond_token(kids[i].second) + emit(kids[i].first);
      if (i + 1 < kids.size()) {
        out += "(" + piece + ")";
      } else {
        out += piece;
      }
    }
    return out;
  }
};

}  // namespace

std::string normalize_pattern(const Pattern &pattern) {
  Emitter e(pattern);
  e.classify(0, -1);
  return e.emit(0);
}

// ---- functional groups ------------------------------------------------------

int FunctionalGroupSet::index_of(const std::string &name) const {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const FunctionalGroupSet &builtin_functional_groups() {
  static const FunctionalGroupSet set = [] {
    const std::pair<const char *, const char *> defs[] = {
        {"alkane", "[CX4;H3,H2,H1]"},
        {"alkene", "[CX3]=[CX3]"},
        {"alkyne", "[CX2]#[CX2]"},
        {"amine", "[NX3;!$(NC=O)]"},
        {"imine", "[NX2]=[CX3]"},
        {"nitrile", "[NX1]#[CX2]"},
        {"alcohol", "[OX2H;!$(OC=O)]"},
        {"ether", "[OX2H0;!$(OC=O);!$([O]-[O])]"},
        {"haloalkane", "[#6;!$(C(=O)[F])][F]"},
        {"aldehyde", "[#6,H][CX3H1](=O)"},
        {"ketone", "[#6][CX3](=O)[#6]"},
        {"ester", "[CX3](=O)[OX2H0]"},
        {"amide", "[CX3](=O)[NX3]"},
        {"arene", "[$([cX2](:*):*),$([cX3](:*):*)]"},
        {"imidazole", "[#7]:[#6]:[#7]"},
        {"pyrazole", "[#7]:[#7]"},
        {"oxazole", "[#7]:[#6]:[#8]"},
        {"isoxazole", "[#7]:[#8]"},
        {"cyclopropane", "C1CC1"},
        {"epoxide", "C1OC1"},
    };
    FunctionalGroupSet s;
    for (const auto &[name, smarts] : defs) {
      s.groups.push_back({name, parse_pattern(smarts)});
    }
    return s;
  }();
  return set;
}

FunctionalGroupSet load_functional_groups(const std::string &path) {
  const std::string text = read_text_file(path);
  FunctionalGroupSet set;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected \"name<TAB>pattern\"");
    }
    const std::string name = trim(line.substr(0, tab));
    const std::string smarts = trim(line.substr(tab + 1));
    if (name.empty() || smarts.empty()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": empty field");
    }
    try {
      set.groups.push_back({name, parse_pattern(smarts)});
    } catch (const ParseError &e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return set;
}

std::vector<int> label_functional_groups(const MolecularGraph &graph,
                                         const FunctionalGroupSet &groups) {
  MatchContext ctx(graph);
  std::vector<int> labels(groups.size(), 0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    labels[k] = matches_anywhere(groups.groups[k].pattern, ctx) ? 1 : 0;
  }
  return labels;
}

std::vector<std::string> present_group_names(const MolecularGraph &graph,
                                             const FunctionalGroupSet &groups) {
  const std::vector<int> labels = label_functional_groups(graph, groups);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == 1) names.push_back(groups.groups[k].name);
  }
  return names;
}

}  // namespace s2g
