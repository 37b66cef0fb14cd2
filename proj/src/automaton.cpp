#include "brw/automaton.hpp"

#include <algorithm>

namespace brw {

PushdownProgram::PushdownProgram(const StepDistribution& sd) {
  controls_.push_back(Control{});
  for (std::size_t j = 0; j < sd.atoms().size(); ++j) {
    const Word& g = sd.atoms()[j].word;
    const int len = static_cast<int>(g.size());
    lengths_.push_back(len);
    probs_.push_back(sd.atoms()[j].prob);
    pop_base_.push_back(static_cast<int>(controls_.size()));
    for (int i = 0; i < len; ++i)
      controls_.push_back(Control{Control::Kind::Pop, static_cast<int>(j), i, g[static_cast<std::size_t>(i)]});
    push_base_.push_back(static_cast<int>(controls_.size()));
    for (int i = 0; i < len; ++i)
      controls_.push_back(Control{Control::Kind::Push, static_cast<int>(j), i, g[static_cast<std::size_t>(i)]});
  }
}

int PushdownProgram::after_pop(int atom, int pos) const noexcept {
  return pos + 1 < lengths_[static_cast<std::size_t>(atom)] ? pop_control(atom, pos + 1) : kIdle;
}

int PushdownProgram::after_push(int atom, int pos) const noexcept {
  return pos + 1 < lengths_[static_cast<std::size_t>(atom)] ? push_control(atom, pos + 1) : kIdle;
}

int RadialAutomaton::state_of(std::span<const Letter> word) const {
  const std::size_t k = std::min<std::size_t>(word.size(), static_cast<std::size_t>(horizon()));
  int node = 0;
  for (std::size_t i = word.size() - k; i < word.size(); ++i)
    node = children_[static_cast<std::size_t>(node)][word[i]];
  return node;
}

RadialAutomaton build_radial_automaton(const TreeSpace& space, const StepDistribution& sd) {
  RadialAutomaton a;
  a.step_ = sd;
  const int L = sd.horizon();
  double acc = 0.0;
  for (const auto& atom : sd.atoms()) {
    a.atom_letters_.emplace_back(atom.word.letters().begin(), atom.word.letters().end());
    a.probs_.push_back(atom.prob);
    acc += atom.prob;
    a.cumulative_.push_back(acc);
  }

  // Breadth-first enumeration of reduced words of length ≤ L; the trie
  // children_ maps a state and an appended letter to the longer state.
  a.states_.push_back(Word{});
  a.children_.emplace_back(static_cast<std::size_t>(space.d), -1);
  for (std::size_t s = 0; s < a.states_.size(); ++s) {
    const Word w = a.states_[s];
    if (static_cast<int>(w.size()) == L) continue;
    for (int l = 0; l < space.d; ++l) {
      if (!w.empty() && w.back() == l) continue;
      std::vector<Letter> letters(w.letters().begin(), w.letters().end());
      letters.push_back(static_cast<Letter>(l));
      a.children_[s][static_cast<std::size_t>(l)] = static_cast<int>(a.states_.size());
      a.states_.push_back(Word::from_letters(space, letters));
      a.children_.emplace_back(static_cast<std::size_t>(space.d), -1);
    }
  }

  const int atoms = a.atom_count();
  a.transitions_.resize(a.states_.size() * static_cast<std::size_t>(atoms));
  for (std::size_t s = 0; s < a.states_.size(); ++s) {
    const Word& w = a.states_[s];
    const int k = static_cast<int>(w.size());
    for (int j = 0; j < atoms; ++j) {
      const auto g = a.atom(j);
      const int c = static_cast<int>(cancellation_depth(w.letters(), g));
      SuffixTransition t;
      t.cancel = c;
      t.increment = static_cast<int>(g.size()) - 2 * c;
      const int known = (k - c) + (static_cast<int>(g.size()) - c);
      if (k < L || known >= L) {
        std::vector<Letter> letters(w.letters().begin(), w.letters().end() - c);
        letters.insert(letters.end(), g.begin() + c, g.end());
        t.next = a.state_of(letters);
      } else {
        t.next = RadialAutomaton::kExposed;
      }
      a.transitions_[s * static_cast<std::size_t>(atoms) + static_cast<std::size_t>(j)] = t;
    }
  }
  a.program_ = PushdownProgram(sd);
  return a;
}

}  // namespace brw
