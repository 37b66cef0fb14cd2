#pragma once

// Word algebra for the d-fold free product Z2 * Z2 * ... * Z2, whose Cayley
// graph with respect to the d involutive generators is the homogeneous tree T_d.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brw {

using Letter = std::uint8_t;

/// The state space T_d, identified with the free product of d copies of Z2.
struct TreeSpace {
  int d = 3;

  /// Throws ValidationError unless 3 ≤ d ≤ 26 (letters are labelled a..z).
  static TreeSpace create(int d);
};

/// A group element in reduced normal form: no two adjacent letters are equal.
/// The empty word is the identity, i.e. the origin o of the tree.
class Word {
 public:
  Word() = default;

  /// Throws ValidationError if a letter is ≥ d or two adjacent letters are equal.
  static Word from_letters(const TreeSpace& space, std::span<const Letter> letters);
  /// Parses labels "a".."z". Same checks as from_letters.
  static Word parse(const TreeSpace& space, std::string_view labels);

  std::span<const Letter> letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const noexcept { return letters_[i]; }
  Letter back() const noexcept { return letters_.back(); }

  std::string str() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  friend Word concat_reduce(const Word&, const Word&);
  friend class WordStack;
  std::vector<Letter> letters_;
};

/// Reduced normal form of w1·w2.
Word concat_reduce(const Word& w1, const Word& w2);

/// Tree distance from the origin, |w| = d(o, w).
inline std::size_t distance(const Word& w) noexcept { return w.size(); }

/// Number of letters of `step` that cancel against the end of `word`.
std::size_t cancellation_depth(std::span<const Letter> word, std::span<const Letter> step) noexcept;

/// A mutable reduced word used by walkers: right multiplication in place.
class WordStack {
 public:
  WordStack() = default;
  explicit WordStack(Word w) : letters_(std::move(w.letters_)) {}

  /// Right-multiplies by `step` and returns the distance increment.
  int apply(std::span<const Letter> step);

  std::size_t size() const noexcept { return letters_.size(); }
  std::span<const Letter> letters() const noexcept { return letters_; }
  Word word() const;

 private:
  std::vector<Letter> letters_;
};

struct StepAtom {
  Word word;
  double prob = 0.0;
};

/// Unvalidated atom as it arrives from a configuration file.
struct RawStepAtom {
  std::vector<int> letters;
  double prob = 0.0;
};

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> errors;
  bool normalized = false;
  /// Finite support makes every exponential moment finite.
  bool exponential_moments_finite = true;
  /// False when the letters in the support miss some factor; the walk then
  /// lives on a proper subgroup and the CLT constant may degenerate.
  bool generates_all_factors = false;
  std::vector<std::string> warnings;
  /// Cancellation horizon: the longest atom.
  int horizon = 0;
};

inline constexpr double kNormalizationTolerance = 1e-12;

ValidationReport validate_step_distribution(const TreeSpace& space, std::span<const RawStepAtom> atoms);

/// Finite-support step law μ on the group.
class StepDistribution {
 public:
  /// Throws ValidationError naming the first offending atom.
  static StepDistribution create(const TreeSpace& space, std::span<const RawStepAtom> atoms);
  static StepDistribution create(const TreeSpace& space,
                                 std::initializer_list<std::pair<std::string_view, double>> atoms);

  const TreeSpace& space() const noexcept { return space_; }
  std::span<const StepAtom> atoms() const noexcept { return atoms_; }
  int horizon() const noexcept { return horizon_; }

 private:
  TreeSpace space_;
  std::vector<StepAtom> atoms_;
  int horizon_ = 0;
};

/// Letter label: 0 → 'a'.
inline char letter_label(Letter l) { return static_cast<char>('a' + l); }

}  // namespace brw
