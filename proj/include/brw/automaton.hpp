#pragma once

// Compiled form of a step distribution.
//
// Two views are built from the same atoms:
//
//  * A suffix table over all reduced words of length ≤ L (L = longest atom).
//    For a state s and an atom g it gives the exact distance increment of
//    w·g for every reduced word w ending in s. The next suffix, however, is
//    only determined when the cancellation does not reach below the stored
//    letters: multiplying "...ba" by "ab" exposes letters the suffix does not
//    hold. Such transitions are marked with `next == kExposed`, and every
//    walker in this library keeps enough of its own word to resolve them.
//
//  * A pushdown program. One atom acts on the word as a sequence of
//    micro-moves that each read only the last letter: compare-and-pop while
//    the atom's prefix matches, then push the remaining letters. The exact
//    radial law is computed on this program (see radial_dp.hpp).

#include <cstdint>
#include <span>
#include <vector>

#include "brw/group.hpp"
#include "brw/rng.hpp"

namespace brw {

struct SuffixTransition {
  int increment = 0;
  int cancel = 0;
  /// Index of the next suffix state, or kExposed.
  int next = 0;
};

/// Control state of the pushdown program.
struct Control {
  enum class Kind : std::uint8_t { Idle, Pop, Push };
  Kind kind = Kind::Idle;
  int atom = -1;
  int pos = 0;
  Letter letter = 0;  // atom letter at `pos`
};

class PushdownProgram {
 public:
  static constexpr int kIdle = 0;

  PushdownProgram() = default;
  explicit PushdownProgram(const StepDistribution& sd);

  int size() const noexcept { return static_cast<int>(controls_.size()); }
  const Control& control(int q) const noexcept { return controls_[static_cast<std::size_t>(q)]; }
  int pop_control(int atom, int pos) const noexcept { return pop_base_[static_cast<std::size_t>(atom)] + pos; }
  int push_control(int atom, int pos) const noexcept { return push_base_[static_cast<std::size_t>(atom)] + pos; }
  /// Control reached after the micro-move at `pos` of `atom` completes.
  int after_pop(int atom, int pos) const noexcept;
  int after_push(int atom, int pos) const noexcept;
  std::span<const double> atom_probs() const noexcept { return probs_; }

 private:
  std::vector<Control> controls_;
  std::vector<int> pop_base_;
  std::vector<int> push_base_;
  std::vector<int> lengths_;
  std::vector<double> probs_;
};

class RadialAutomaton {
 public:
  static constexpr int kExposed = -1;

  RadialAutomaton() = default;

  const StepDistribution& step() const noexcept { return step_; }
  const TreeSpace& space() const noexcept { return step_.space(); }
  int horizon() const noexcept { return step_.horizon(); }
  int atom_count() const noexcept { return static_cast<int>(atom_letters_.size()); }
  std::span<const Letter> atom(int j) const noexcept { return atom_letters_[static_cast<std::size_t>(j)]; }
  double atom_prob(int j) const noexcept { return probs_[static_cast<std::size_t>(j)]; }

  int state_count() const noexcept { return static_cast<int>(states_.size()); }
  const Word& state(int s) const noexcept { return states_[static_cast<std::size_t>(s)]; }
  /// State holding the last min(|w|, L) letters of w.
  int state_of(std::span<const Letter> word) const;
  const SuffixTransition& transition(int s, int atom) const noexcept {
    return transitions_[static_cast<std::size_t>(s * atom_count() + atom)];
  }

  /// Distance increment of w·g, read from the suffix table.
  int increment(std::span<const Letter> word, int atom) const { return transition(state_of(word), atom).increment; }

  /// Draws an atom index from μ.
  int sample_atom(Rng& rng) const noexcept {
    const double u = rng.uniform();
    const int last = atom_count() - 1;
    for (int j = 0; j < last; ++j)
      if (u < cumulative_[static_cast<std::size_t>(j)]) return j;
    return last;
  }

  const PushdownProgram& program() const noexcept { return program_; }

 private:
  friend RadialAutomaton build_radial_automaton(const TreeSpace&, const StepDistribution&);

  StepDistribution step_;
  std::vector<std::vector<Letter>> atom_letters_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  std::vector<Word> states_;
  std::vector<SuffixTransition> transitions_;
  std::vector<std::vector<int>> children_;  // trie over states: children_[s][letter]
  PushdownProgram program_;
};

RadialAutomaton build_radial_automaton(const TreeSpace& space, const StepDistribution& sd);

}  // namespace brw
