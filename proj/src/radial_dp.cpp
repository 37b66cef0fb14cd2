#include "brw/radial_dp.hpp"

#include <algorithm>
#include <array>

#include "brw/walk.hpp"

namespace brw {

RadialDp::RadialDp(const RadialAutomaton& automaton, double tail_tolerance)
    : automaton_(&automaton),
      program_(&automaton.program()),
      letters_(automaton.space().d),
      controls_(automaton.program().size()),
      tail_tolerance_(tail_tolerance) {
  post_pop_controls_.push_back(PushdownProgram::kIdle);
  for (int q = 0; q < controls_; ++q) {
    const Control& c = program_->control(q);
    if (c.kind == Control::Kind::Push) push_controls_.push_back(q);
    if (c.kind == Control::Kind::Pop && c.pos > 0) post_pop_controls_.push_back(q);
  }
  // Pushes of one atom in ascending position: a push can lead to a later
  // push of the same atom without drawing a new atom, never the other way.
  std::stable_sort(push_controls_.begin(), push_controls_.end(), [&](int a, int b) {
    const Control& ca = program_->control(a);
    const Control& cb = program_->control(b);
    return ca.atom != cb.atom ? ca.atom < cb.atom : ca.pos < cb.pos;
  });
}

void RadialDp::extend(int target) {
  const PushdownProgram& prog = *program_;
  const int Q = controls_;
  const int empty = letters_;
  const std::size_t block = static_cast<std::size_t>(letters_ + 1) * static_cast<std::size_t>(Q) *
                            static_cast<std::size_t>(Q);

  for (int m = static_cast<int>(n_.size()); m <= target; ++m) {
    std::vector<double> nm(block, 0.0);
    std::vector<double> pm(block, 0.0);

    auto pop_summary = [&](int q1) {
      for (int q = 0; q < Q; ++q) {
        const Control& c = prog.control(q);
        if (c.kind != Control::Kind::Pop) continue;
        const int y = c.letter;
        const double v = nm[slot(y, q1, q)];
        if (v != 0.0) pm[slot(y, q1, prog.after_pop(c.atom, c.pos))] += v;
      }
    };

    // Idle: draw an atom, which costs one unit of time.
    for (int x = 0; x <= empty; ++x) {
      double* row = &nm[slot(x, PushdownProgram::kIdle, 0)];
      if (m == 0) row[PushdownProgram::kIdle] += 1.0;
      if (m >= 1) {
        const auto& prev = n_[static_cast<std::size_t>(m - 1)];
        for (int j = 0; j < automaton_->atom_count(); ++j) {
          const double w = automaton_->atom_prob(j);
          const double* src = &prev[slot(x, prog.pop_control(j, 0), 0)];
          for (int q = 0; q < Q; ++q) row[q] += w * src[q];
        }
      }
    }
    pop_summary(PushdownProgram::kIdle);

    // Pushes, last position first: the excursion above the pushed letter
    // starts in after_push, whose tables for time m are then complete.
    for (int j = 0; j < automaton_->atom_count(); ++j) {
      const int len = static_cast<int>(automaton_->atom(j).size());
      for (int i = len - 1; i >= 0; --i) {
        const int q0 = prog.push_control(j, i);
        const int g = prog.control(q0).letter;
        const int q1 = prog.after_push(j, i);
        for (int x = 0; x <= empty; ++x) {
          double* row = &nm[slot(x, q0, 0)];
          if (m == 0) row[q0] += 1.0;
          for (int m1 = 1; m1 <= lag_cap(m); ++m1) {
            const auto& pblock = m1 == m ? pm : p_[static_cast<std::size_t>(m1)];
            const double* prow = &pblock[slot(g, q1, 0)];
            const auto& nblock = n_[static_cast<std::size_t>(m - m1)];
            for (int q2 : post_pop_controls_) {
              const double w = prow[q2];
              if (w == 0.0) continue;
              const double* src = &nblock[slot(x, q2, 0)];
              for (int q = 0; q < Q; ++q) row[q] += w * src[q];
            }
          }
        }
        pop_summary(q0);
      }
    }

    // Compare-and-pop: on a mismatch with X the atom switches to pushing;
    // a match pops X and leaves the level, which N excludes.
    for (int q0 = 0; q0 < Q; ++q0) {
      const Control& c = prog.control(q0);
      if (c.kind != Control::Kind::Pop) continue;
      const int u = prog.push_control(c.atom, c.pos);
      for (int x = 0; x <= empty; ++x) {
        double* row = &nm[slot(x, q0, 0)];
        if (m == 0) row[q0] += 1.0;
        if (x == c.letter) continue;
        const double* src = &nm[slot(x, u, 0)];
        for (int q = 0; q < Q; ++q) row[q] += src[q];
      }
    }

    if (m >= 1) update_lag_limit(m, nm, pm);
    n_.push_back(std::move(nm));
    p_.push_back(std::move(pm));
  }
}

void RadialDp::update_lag_limit(int m, const std::vector<double>& nm, const std::vector<double>& pm) {
  if (tail_tolerance_ <= 0.0 || lag_limit_ > 0) return;
  double amp = 0.0;
  for (double v : nm) amp = std::max(amp, v);
  for (double v : pm) amp = std::max(amp, v);
  amplitude_.push_back(amp);

  // Compare sums over consecutive blocks of steps, which smooths out any
  // periodicity of the walk. Three shrinking blocks give a ratio r; the tail
  // beyond m is then bounded by a geometric series on the last block.
  constexpr int kBlock = 8;
  constexpr int kMinLag = 64;
  if (m < kMinLag) return;
  auto block = [&](int back) {
    double s = 0.0;
    for (int i = 0; i < kBlock; ++i) s += amplitude_[amplitude_.size() - 1 - static_cast<std::size_t>(back * kBlock + i)];
    return s;
  };
  const double b0 = block(0), b1 = block(1), b2 = block(2);
  if (!(b1 > 0.0 && b2 > 0.0) || b0 > b1 || b1 > b2) return;
  const double r = std::max(b0 / b1, b1 / b2);
  if (r >= 0.999) return;
  const double entries = static_cast<double>(nm.size());
  if (b0 * r / (1.0 - r) * entries < tail_tolerance_) lag_limit_ = m;
}

std::vector<RadialLaw> RadialDp::laws(int n) {
  extend(n);
  const PushdownProgram& prog = *program_;
  const int L = automaton_->horizon();
  const int empty = letters_;
  const std::size_t pushes = push_controls_.size();

  // ain[t][h * pushes + k]: probability of visiting push control k at height
  // h after t atoms, summed over the top letter.
  std::vector<std::vector<double>> ain(static_cast<std::size_t>(n + 1));
  std::vector<RadialLaw> out(static_cast<std::size_t>(n + 1));
  for (int t = 0; t <= n; ++t) {
    const int hmax = L * t;
    auto& cur = ain[static_cast<std::size_t>(t)];
    cur.assign(static_cast<std::size_t>(hmax + 1) * pushes, 0.0);
    RadialLaw& law = out[static_cast<std::size_t>(t)];
    law.n = t;
    law.masses.assign(static_cast<std::size_t>(hmax + 1), 0.0);

    const auto& base = n_[static_cast<std::size_t>(t)];
    law.masses[0] = base[slot(empty, PushdownProgram::kIdle, PushdownProgram::kIdle)];
    for (std::size_t k = 0; k < pushes; ++k) cur[k] = base[slot(empty, PushdownProgram::kIdle, push_controls_[k])];

    for (int h = 1; h <= hmax; ++h) {
      double idle_mass = 0.0;
      for (std::size_t k = 0; k < pushes; ++k) {
        const Control& c = prog.control(push_controls_[k]);
        const int x = c.letter;
        const int q1 = prog.after_push(c.atom, c.pos);
        for (int t0 = t - lag_cap(t); t0 <= t; ++t0) {
          const auto& prev = ain[static_cast<std::size_t>(t0)];
          const std::size_t idx = static_cast<std::size_t>(h - 1) * pushes + k;
          if (idx >= prev.size()) continue;
          const double a = prev[idx];
          if (a == 0.0) continue;
          const double* nrow = &n_[static_cast<std::size_t>(t - t0)][slot(x, q1, 0)];
          idle_mass += a * nrow[PushdownProgram::kIdle];
          double* dst = &cur[static_cast<std::size_t>(h) * pushes];
          for (std::size_t k2 = 0; k2 < pushes; ++k2) dst[k2] += a * nrow[push_controls_[k2]];
        }
      }
      law.masses[static_cast<std::size_t>(h)] = idle_mass;
    }
  }
  return out;
}

std::vector<DistanceMoments> RadialDp::moments(int n) {
  extend(n);
  const PushdownProgram& prog = *program_;
  const int empty = letters_;
  const std::size_t pushes = push_controls_.size();

  // a[t][k][r] = Σ_h h^r · (visit probability of push control k at height h, time t)
  // b[t][k][r] = Σ_h (h+1)^r · (same), the weight carried by the next push.
  using Triple = std::array<double, 3>;
  std::vector<std::vector<Triple>> a(static_cast<std::size_t>(n + 1), std::vector<Triple>(pushes));
  std::vector<std::vector<Triple>> b(static_cast<std::size_t>(n + 1), std::vector<Triple>(pushes));
  std::vector<DistanceMoments> out(static_cast<std::size_t>(n + 1));

  auto accumulate = [&](int t, std::size_t k, int q, Triple& s, bool same_time_only, std::size_t k_limit) {
    (void)k;
    const int t_lo = same_time_only ? t : t - lag_cap(t);
    const int t_hi = same_time_only ? t : t - 1;
    for (std::size_t k0 = 0; k0 < (same_time_only ? k_limit : pushes); ++k0) {
      const Control& c = prog.control(push_controls_[k0]);
      const int x = c.letter;
      const int q1 = prog.after_push(c.atom, c.pos);
      for (int t0 = t_lo; t0 <= t_hi; ++t0) {
        const Triple& w = b[static_cast<std::size_t>(t0)][k0];
        if (w[0] == 0.0) continue;
        const double nv = n_[static_cast<std::size_t>(t - t0)][slot(x, q1, q)];
        if (nv == 0.0) continue;
        for (int r = 0; r < 3; ++r) s[static_cast<std::size_t>(r)] += w[static_cast<std::size_t>(r)] * nv;
      }
    }
  };

  for (int t = 0; t <= n; ++t) {
    const auto& base = n_[static_cast<std::size_t>(t)];
    for (std::size_t k = 0; k < pushes; ++k) {
      const int q = push_controls_[k];
      Triple s{base[slot(empty, PushdownProgram::kIdle, q)], 0.0, 0.0};
      accumulate(t, k, q, s, false, 0);
      accumulate(t, k, q, s, true, k);  // earlier pushes within the same atom draw
      a[static_cast<std::size_t>(t)][k] = s;
      b[static_cast<std::size_t>(t)][k] = {s[0], s[1] + s[0], s[2] + 2.0 * s[1] + s[0]};
    }
    Triple s{0.0, 0.0, 0.0};
    accumulate(t, 0, PushdownProgram::kIdle, s, false, 0);
    accumulate(t, 0, PushdownProgram::kIdle, s, true, pushes);
    out[static_cast<std::size_t>(t)] = {s[1], s[2]};
  }
  return out;
}

}  // namespace brw
