#include "brw/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "brw/error.hpp"

namespace brw {

TreeSpace TreeSpace::create(int d) {
  if (d < 3 || d > 26) throw ValidationError("d", "degree must lie in [3, 26], got " + std::to_string(d));
  return TreeSpace{d};
}

Word Word::from_letters(const TreeSpace& space, std::span<const Letter> letters) {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i] >= space.d)
      throw ValidationError("", "letter index " + std::to_string(letters[i]) + " outside [0, " +
                                    std::to_string(space.d) + ")");
    if (i > 0 && letters[i] == letters[i - 1])
      throw ValidationError("", "word is not reduced: adjacent letters at position " + std::to_string(i));
  }
  Word w;
  w.letters_.assign(letters.begin(), letters.end());
  return w;
}

Word Word::parse(const TreeSpace& space, std::string_view labels) {
  std::vector<Letter> letters;
  letters.reserve(labels.size());
  for (char c : labels) {
    if (c < 'a' || c > 'z') throw ValidationError("", std::string("invalid letter label '") + c + "'");
    letters.push_back(static_cast<Letter>(c - 'a'));
  }
  return from_letters(space, letters);
}

std::string Word::str() const {
  std::string s;
  s.reserve(letters_.size());
  for (Letter l : letters_) s.push_back(letter_label(l));
  return s;
}

std::size_t cancellation_depth(std::span<const Letter> word, std::span<const Letter> step) noexcept {
  std::size_t c = 0;
  const std::size_t limit = std::min(word.size(), step.size());
  while (c < limit && word[word.size() - 1 - c] == step[c]) ++c;
  return c;
}

Word concat_reduce(const Word& w1, const Word& w2) {
  const std::size_t c = cancellation_depth(w1.letters_, w2.letters_);
  Word out;
  out.letters_.reserve(w1.size() + w2.size() - 2 * c);
  out.letters_.insert(out.letters_.end(), w1.letters_.begin(), w1.letters_.end() - static_cast<std::ptrdiff_t>(c));
  out.letters_.insert(out.letters_.end(), w2.letters_.begin() + static_cast<std::ptrdiff_t>(c), w2.letters_.end());
  return out;
}

int WordStack::apply(std::span<const Letter> step) {
  const std::size_t c = cancellation_depth(letters_, step);
  letters_.resize(letters_.size() - c);
  letters_.insert(letters_.end(), step.begin() + static_cast<std::ptrdiff_t>(c), step.end());
  return static_cast<int>(step.size()) - 2 * static_cast<int>(c);
}

Word WordStack::word() const {
  Word w;
  w.letters_ = letters_;
  return w;
}

namespace {

std::string atom_field(std::size_t i) { return "step[" + std::to_string(i) + "]"; }

std::string render(const std::vector<int>& letters) {
  std::string s;
  for (int l : letters) s.push_back(l >= 0 && l < 26 ? static_cast<char>('a' + l) : '?');
  return s.empty() ? std::string("(identity)") : s;
}

}  // namespace

ValidationReport validate_step_distribution(const TreeSpace& space, std::span<const RawStepAtom> atoms) {
  ValidationReport report;
  if (atoms.empty()) report.errors.push_back("step: support is empty");

  std::set<std::vector<int>> seen;
  std::vector<bool> used(static_cast<std::size_t>(std::max(space.d, 0)), false);
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    const std::string name = atom_field(i) + " '" + render(a.letters) + "'";
    if (!(a.prob > 0.0) || !std::isfinite(a.prob))
      report.errors.push_back(name + ": weight must be strictly positive, got " + std::to_string(a.prob));
    total += a.prob;
    if (a.letters.empty()) report.errors.push_back(name + ": identity atoms are not supported");
    bool letters_ok = true;
    for (std::size_t j = 0; j < a.letters.size(); ++j) {
      if (a.letters[j] < 0 || a.letters[j] >= space.d) {
        report.errors.push_back(name + ": letter index " + std::to_string(a.letters[j]) + " outside [0, " +
                                std::to_string(space.d) + ")");
        letters_ok = false;
      } else if (j > 0 && a.letters[j] == a.letters[j - 1]) {
        report.errors.push_back(name + ": word is not reduced (adjacent equal letters at position " +
                                std::to_string(j) + ")");
        letters_ok = false;
      }
    }
    if (letters_ok)
      for (int l : a.letters) used[static_cast<std::size_t>(l)] = true;
    if (!seen.insert(a.letters).second) report.errors.push_back(name + ": duplicate word");
    report.horizon = std::max(report.horizon, static_cast<int>(a.letters.size()));
  }

  report.normalized = std::abs(total - 1.0) <= kNormalizationTolerance;
  if (!report.normalized && !atoms.empty())
    report.errors.push_back("step: weights sum to " + std::to_string(total) + ", expected 1");

  report.generates_all_factors = std::all_of(used.begin(), used.end(), [](bool b) { return b; });
  if (!report.generates_all_factors) {
    std::string missing;
    for (std::size_t l = 0; l < used.size(); ++l)
      if (!used[l]) missing.push_back(static_cast<char>('a' + l));
    report.warnings.push_back("support never uses letter(s) '" + missing +
                              "': the walk lives on a proper subgroup and sigma may be degenerate");
  }
  report.ok = report.errors.empty();
  return report;
}

StepDistribution StepDistribution::create(const TreeSpace& space, std::span<const RawStepAtom> atoms) {
  const ValidationReport report = validate_step_distribution(space, atoms);
  if (!report.ok) {
    const std::string& first = report.errors.front();
    const auto colon = first.find(':');
    throw ValidationError(first.substr(0, colon), first.substr(colon + 2));
  }
  StepDistribution sd;
  sd.space_ = space;
  sd.horizon_ = report.horizon;
  for (const auto& a : atoms) {
    std::vector<Letter> letters(a.letters.begin(), a.letters.end());
    sd.atoms_.push_back({Word::from_letters(space, letters), a.prob});
  }
  return sd;
}

StepDistribution StepDistribution::create(const TreeSpace& space,
                                          std::initializer_list<std::pair<std::string_view, double>> atoms) {
  std::vector<RawStepAtom> raw;
  for (const auto& [labels, prob] : atoms) {
    RawStepAtom a;
    for (char c : labels) a.letters.push_back(c - 'a');
    a.prob = prob;
    raw.push_back(std::move(a));
  }
  return create(space, raw);
}

}  // namespace brw
