#include "brw/oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "brw/error.hpp"
#include "brw/stats.hpp"
#include "brw/walk.hpp"

namespace brw {

namespace {

// Calls visit(prob, atoms) for every (k, g_1..g_k) outcome of one generation.
template <class Visit>
void for_each_outcome(const OffspringDistribution& pi, const RadialAutomaton& aut, Visit&& visit) {
  const int atoms = aut.atom_count();
  std::vector<int> idx;
  for (const auto& o : pi.atoms()) {
    idx.assign(static_cast<std::size_t>(o.k), 0);
    while (true) {
      double p = o.prob;
      for (int j : idx) p *= aut.atom_prob(j);
      visit(p, idx);
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == atoms) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
  }
}

Word child_word(const RadialAutomaton& aut, const Word& w, int atom) {
  return concat_reduce(w, aut.step().atoms()[static_cast<std::size_t>(atom)].word);
}

using Key = std::pair<Word, int>;

class Enumerator {
 public:
  Enumerator(const OffspringDistribution& pi, const RadialAutomaton& aut) : pi_(pi), aut_(aut) {}

  const std::vector<double>& measure(const Word& w, int r) {
    const Key key{w, r};
    if (auto it = measures_.find(key); it != measures_.end()) return it->second;
    std::vector<double> out;
    if (r == 0) {
      out.assign(w.size() + 1, 0.0);
      out[w.size()] = 1.0;
    } else {
      std::vector<CompensatedSum> acc;
      for_each_outcome(pi_, aut_, [&](double p, const std::vector<int>& idx) {
        for (int j : idx) {
          const auto& m = measure(child_word(aut_, w, j), r - 1);
          if (acc.size() < m.size()) acc.resize(m.size());
          for (std::size_t a = 0; a < m.size(); ++a) acc[a].add(p * m[a]);
        }
      });
      out.reserve(acc.size());
      for (const auto& c : acc) out.push_back(c.value());
    }
    return measures_.emplace(key, std::move(out)).first->second;
  }

  double pair(const Word& w, int r, const std::function<double(int, int)>& f) {
    const Key key{w, r};
    if (auto it = pairs_.find(key); it != pairs_.end()) return it->second;
    double value = 0.0;
    if (r == 0) {
      value = f(static_cast<int>(w.size()), static_cast<int>(w.size()));
    } else {
      CompensatedSum acc;
      std::vector<Word> kids;
      for_each_outcome(pi_, aut_, [&](double p, const std::vector<int>& idx) {
        kids.clear();
        for (int j : idx) kids.push_back(child_word(aut_, w, j));
        for (std::size_t i = 0; i < kids.size(); ++i) {
          acc.add(p * pair(kids[i], r - 1, f));
          for (std::size_t j = 0; j < kids.size(); ++j) {
            if (i == j) continue;
            acc.add(p * cross(kids[i], kids[j], r - 1, f));
          }
        }
      });
      value = acc.value();
    }
    pairs_.emplace(key, value);
    return value;
  }

 private:
  // Distinct children have independent subtrees: E[Σ_{v ∈ A} Σ_{v' ∈ B} f] = Σ m_A(a) m_B(b) f(a, b).
  double cross(const Word& u, const Word& v, int r, const std::function<double(int, int)>& f) {
    const auto& mu = measure(u, r);
    const auto& mv = measure(v, r);
    double s = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      if (mu[a] == 0.0) continue;
      for (std::size_t b = 0; b < mv.size(); ++b)
        if (mv[b] != 0.0) s += mu[a] * mv[b] * f(static_cast<int>(a), static_cast<int>(b));
    }
    return s;
  }

  const OffspringDistribution& pi_;
  const RadialAutomaton& aut_;
  std::map<Key, std::vector<double>> measures_;
  std::map<Key, double> pairs_;
};

std::string describe(const OffspringDistribution& pi, const RadialAutomaton& aut, int n) {
  std::ostringstream os;
  os << "n=" << n << " pi={";
  bool first = true;
  for (const auto& a : pi.atoms()) {
    os << (first ? "" : ",") << a.k << ":" << a.prob;
    first = false;
  }
  os << "} mu_atoms=" << aut.atom_count();
  return os.str();
}

}  // namespace

double enumeration_size(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n) {
  const double atoms = automaton.atom_count();
  double per_node = 0.0;
  for (const auto& o : pi.atoms()) per_node += std::pow(atoms, o.k);
  double total = 0.0;
  for (int r = 1; r <= n; ++r) total += std::pow(atoms, n - r) * per_node;
  return total;
}

void check_budget(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                  const EnumerationBudget& budget) {
  if (n < 0) throw ValidationError("n", "must be nonnegative");
  if (budget.max_depth > 4) throw ValidationError("max_depth", "enumeration depth is limited to 4");
  if (n > budget.max_depth)
    throw BudgetExceeded("enumeration depth " + std::to_string(n) + " exceeds max_depth " +
                         std::to_string(budget.max_depth));
  if (pi.max_k() > budget.max_offspring)
    throw BudgetExceeded("offspring count " + std::to_string(pi.max_k()) + " exceeds max_offspring " +
                         std::to_string(budget.max_offspring));
  if (automaton.atom_count() > budget.max_step_atoms)
    throw BudgetExceeded("step law has " + std::to_string(automaton.atom_count()) + " atoms, max_step_atoms is " +
                         std::to_string(budget.max_step_atoms));
  const double size = enumeration_size(pi, automaton, n);
  if (size > budget.max_paths) {
    std::ostringstream os;
    os << "enumeration would visit " << size << " outcome tuples, limit " << budget.max_paths;
    throw BudgetExceeded(os.str());
  }
}

double enumeration_mass(const OffspringDistribution& pi, const RadialAutomaton& automaton) {
  CompensatedSum s;
  for_each_outcome(pi, automaton, [&](double p, const std::vector<int>&) { s.add(p); });
  return s.value();
}

std::vector<double> exact_distance_measure(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                                           const EnumerationBudget& budget) {
  check_budget(pi, automaton, n, budget);
  Enumerator e(pi, automaton);
  return e.measure(Word{}, n);
}

double exact_functional(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                        const std::function<double(int)>& f, const EnumerationBudget& budget) {
  const auto m = exact_distance_measure(pi, automaton, n, budget);
  CompensatedSum s;
  for (std::size_t a = 0; a < m.size(); ++a)
    if (m[a] != 0.0) s.add(m[a] * f(static_cast<int>(a)));
  return s.value();
}

double exact_pair_functional(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                             const std::function<double(int, int)>& f, const EnumerationBudget& budget) {
  check_budget(pi, automaton, n, budget);
  Enumerator e(pi, automaton);
  return e.pair(Word{}, n, f);
}

std::vector<IdentityCheck> verify_many_to_one(const OffspringDistribution& pi, const RadialAutomaton& automaton,
                                              int n, double tolerance, const EnumerationBudget& budget) {
  struct Entry {
    const char* name;
    std::function<double(int)> f;
  };
  const std::vector<Entry> battery = {
      {"one", [](int) { return 1.0; }},
      {"identity", [](int a) { return static_cast<double>(a); }},
      {"square", [](int a) { return static_cast<double>(a) * a; }},
      {"indicator[0,2]", [](int a) { return a <= 2 ? 1.0 : 0.0; }},
  };
  const auto measure = exact_distance_measure(pi, automaton, n, budget);
  const RadialLaw law = exact_radial_law(automaton, n);
  const double rho_n = std::pow(moments(pi).moments.rho, n);
  std::vector<IdentityCheck> out;
  for (const auto& [name, f] : battery) {
    IdentityCheck c;
    c.identity = std::string("many-to-one f=") + name;
    c.parameters = describe(pi, automaton, n);
    CompensatedSum lhs;
    for (std::size_t a = 0; a < measure.size(); ++a) lhs.add(measure[a] * f(static_cast<int>(a)));
    c.lhs = lhs.value();
    c.rhs = rho_n * law.expect([&](double k) { return f(static_cast<int>(k)); });
    c.residual = std::abs(c.lhs - c.rhs);
    c.pass = c.residual < tolerance;
    out.push_back(std::move(c));
  }
  return out;
}

IdentityCheck verify_second_moment(const OffspringDistribution& pi, const RadialAutomaton& automaton, int n,
                                   double tolerance, const EnumerationBudget& budget) {
  IdentityCheck c;
  c.identity = "second moment E[Z_n^2]";
  c.parameters = describe(pi, automaton, n);
  c.lhs = exact_pair_functional(pi, automaton, n, [](int, int) { return 1.0; }, budget);
  const Moments m = moments(pi).moments;
  c.rhs = std::pow(m.rho, 2 * n) * exact_second_moment_Wn(m, n);
  c.residual = std::abs(c.lhs - c.rhs);
  c.pass = c.residual < tolerance;
  return c;
}

}  // namespace brw
