#include "polyclt/cubature.hpp"
#include "polyclt/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace polyclt {
namespace {

constexpr int kPoints = 15;

// Kronrod nodes on [-1, 1] in increasing order; Gauss nodes sit at odd indices.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule {
  std::array<double, kPoints> node{};
  std::array<double, kPoints> kronrod{};
  std::array<double, kPoints> gauss{};
};

Rule make_rule() {
  Rule r;
  for (int i = 0; i < 8; ++i) {
    const double g = (i % 2 == 1) ? kWg[i / 2] : 0.0;
    r.node[i] = -kXgk[i];
    r.node[14 - i] = kXgk[i];
    r.kronrod[i] = r.kronrod[14 - i] = kWgk[i];
    r.gauss[i] = r.gauss[14 - i] = g;
  }
  return r;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

struct Evaluated {
  Panel box;
  std::vector<Complex> value;
  std::vector<double> error;
  int split = 0;
  double priority = 0.0;
};

class PanelRule {
 public:
  PanelRule(int dim, int components, const Integrand& f)
      : dim_(dim), comps_(components), f_(f), values_(components), mixed_(dim * components),
        gauss_(components) {
    points_ = 1;
    for (int d = 0; d < dim; ++d) points_ *= kPoints;
  }

  std::int64_t points() const { return points_; }

  Evaluated operator()(const Panel& box) {
    const Rule& r = rule();
    Evaluated e;
    e.box = box;
    e.value.assign(comps_, Complex{});
    e.error.assign(comps_, 0.0);
    std::fill(gauss_.begin(), gauss_.end(), Complex{});
    std::fill(mixed_.begin(), mixed_.end(), Complex{});

    std::array<double, Panel::kMaxDim> mid{}, half{};
    double volume = 1.0;
    for (int d = 0; d < dim_; ++d) {
      mid[d] = 0.5 * (box.lo[d] + box.hi[d]);
      half[d] = 0.5 * (box.hi[d] - box.lo[d]);
      volume *= half[d];
    }

    std::array<int, Panel::kMaxDim> idx{};
    std::array<double, Panel::kMaxDim> x{};
    for (std::int64_t p = 0; p < points_; ++p) {
      std::int64_t rest = p;
      double wk = 1.0;
      double wg = 1.0;
      for (int d = 0; d < dim_; ++d) {
        idx[d] = static_cast<int>(rest % kPoints);
        rest /= kPoints;
        x[d] = mid[d] + half[d] * r.node[idx[d]];
        wk *= r.kronrod[idx[d]];
        wg *= r.gauss[idx[d]];
      }
      f_(x.data(), values_.data());
      for (int k = 0; k < comps_; ++k) {
        e.value[k] += wk * values_[k];
        gauss_[k] += wg * values_[k];
      }
      for (int d = 0; d < dim_; ++d) {
        const double g = r.gauss[idx[d]];
        if (g == 0.0) continue;
        const double wm = wk / r.kronrod[idx[d]] * g;
        for (int k = 0; k < comps_; ++k) mixed_[d * comps_ + k] += wm * values_[k];
      }
    }

    double best_indicator = -1.0;
    for (int k = 0; k < comps_; ++k) {
      e.value[k] *= volume;
      e.error[k] = std::abs(e.value[k] - volume * gauss_[k]);
      e.priority = std::max(e.priority, e.error[k]);
    }
    for (int d = 0; d < dim_; ++d) {
      double indicator = 0.0;
      for (int k = 0; k < comps_; ++k) {
        indicator += std::abs(volume * mixed_[d * comps_ + k] - e.value[k]);
      }
      // Ties (e.g. all zero) go to the widest axis.
      indicator += 1e-300 * half[d];
      if (indicator > best_indicator) {
        best_indicator = indicator;
        e.split = d;
      }
    }
    return e;
  }

 private:
  int dim_;
  int comps_;
  const Integrand& f_;
  std::int64_t points_ = 1;
  std::vector<Complex> values_;
  std::vector<Complex> mixed_;
  std::vector<Complex> gauss_;
};

}  // namespace

CubatureResult integrate_panels(int dim, int components, const Integrand& f,
                                std::vector<Panel> initial, const StopRule& stop,
                                std::int64_t max_evals) {
  if (dim < 1 || dim > Panel::kMaxDim) {
    throw Error(ErrorCode::DimensionTooLarge, "cubature supports 1 to 4 dimensions");
  }
  if (components < 1) throw Error(ErrorCode::InvalidArgument, "no integrand components");

  PanelRule evaluate(dim, components, f);
  CubatureResult result;
  result.value.assign(components, Complex{});
  result.error.assign(components, 0.0);

  std::vector<Evaluated> panels;
  panels.reserve(initial.size() * 4);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> queue;

  auto add = [&](Evaluated e) {
    for (int k = 0; k < components; ++k) {
      result.value[k] += e.value[k];
      result.error[k] += e.error[k];
    }
    result.evaluations += evaluate.points();
    queue.emplace(e.priority, panels.size());
    panels.push_back(std::move(e));
  };

  for (const auto& box : initial) add(evaluate(box));

  auto exact_totals = [&] {
    std::fill(result.value.begin(), result.value.end(), Complex{});
    std::fill(result.error.begin(), result.error.end(), 0.0);
    for (const auto& e : panels) {
      for (int k = 0; k < components; ++k) {
        result.value[k] += e.value[k];
        result.error[k] += e.error[k];
      }
    }
  };

  std::size_t since_resum = 0;
  for (;;) {
    if (stop(result.value, result.error)) {
      exact_totals();
      if (stop(result.value, result.error)) {
        result.converged = true;
        break;
      }
    }
    if (queue.empty() || result.evaluations + 2 * evaluate.points() > max_evals) break;

    const std::size_t worst = queue.top().second;
    queue.pop();
    Evaluated parent = std::move(panels[worst]);
    for (int k = 0; k < components; ++k) {
      result.value[k] -= parent.value[k];
      result.error[k] -= parent.error[k];
    }
    const int d = parent.split;
    const double cut = 0.5 * (parent.box.lo[d] + parent.box.hi[d]);
    Panel left = parent.box;
    Panel right = parent.box;
    left.hi[d] = cut;
    right.lo[d] = cut;

    Evaluated first = evaluate(left);
    for (int k = 0; k < components; ++k) {
      result.value[k] += first.value[k];
      result.error[k] += first.error[k];
    }
    result.evaluations += evaluate.points();
    queue.emplace(first.priority, worst);
    panels[worst] = std::move(first);
    add(evaluate(right));

    // Incremental totals drift; resum now and then.
    if (++since_resum == 4096) {
      exact_totals();
      since_resum = 0;
    }
  }
  if (!result.converged) exact_totals();
  result.panels = panels.size();
  return result;
}

std::vector<double> graded_breakpoints(double radius, double first, double growth) {
  std::vector<double> positive;
  for (double h = first; h < radius; h *= growth) positive.push_back(h);
  positive.push_back(radius);
  std::vector<double> points;
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) points.push_back(-*it);
  points.push_back(0.0);
  points.insert(points.end(), positive.begin(), positive.end());
  return points;
}

std::vector<Panel> tensor_panels(const std::vector<std::vector<double>>& axes) {
  std::vector<Panel> panels(1);
  for (std::size_t d = 0; d < axes.size(); ++d) {
    std::vector<Panel> next;
    for (const auto& base : panels) {
      for (std::size_t i = 0; i + 1 < axes[d].size(); ++i) {
        if (!(axes[d][i + 1] > axes[d][i])) continue;
        Panel p = base;
        p.lo[d] = axes[d][i];
        p.hi[d] = axes[d][i + 1];
        next.push_back(p);
      }
    }
    panels = std::move(next);
  }
  return panels;
}

}  // namespace polyclt
