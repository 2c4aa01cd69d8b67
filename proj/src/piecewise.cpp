#include "algotune/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace algotune {

namespace {

double scale_of(double x) { return std::max(1.0, std::fabs(x)); }

bool close_points(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= kCmpEps * scale_of(std::max(std::fabs(a), std::fabs(b)));
}

double json_number(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("bad number in piecewise JSON: " + s);
  }
  return v.get<double>();
}

nlohmann::json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? nlohmann::json("inf") : nlohmann::json("-inf");
  return x;
}

}  // namespace

PiecewiseFunction1D::PiecewiseFunction1D(double lo, double hi, std::vector<double> breakpoints,
                                         std::vector<Piece> pieces)
    : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi) || lo == kInf || hi == -kInf)
    throw std::invalid_argument("piecewise: invalid domain");
  if (pieces.size() != breakpoints.size() + 1)
    throw std::invalid_argument("piecewise: need exactly one more piece than breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double t = breakpoints[i];
    if (!std::isfinite(t) || !(t > lo) || !(t < hi))
      throw std::invalid_argument("piecewise: breakpoint outside open domain");
    if (i > 0 && !(t > breakpoints[i - 1]))
      throw std::invalid_argument("piecewise: breakpoints must be strictly increasing");
  }
  for (const auto& p : pieces)
    if (!std::isfinite(p.slope) || !std::isfinite(p.intercept))
      throw std::invalid_argument("piecewise: non-finite piece coefficients");

  // Canonical form: coalesce near-duplicate breakpoints (the right piece
  // wins) and merge identical neighbours.
  breakpoints_.reserve(breakpoints.size());
  pieces_.reserve(pieces.size());
  pieces_.push_back(pieces[0]);
  double prev = lo;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double t = breakpoints[i];
    const Piece& next = pieces[i + 1];
    if (close_points(t, prev)) {
      pieces_.back() = next;
      if (pieces_.size() >= 2 && pieces_[pieces_.size() - 2] == pieces_.back()) {
        pieces_.pop_back();
        breakpoints_.pop_back();
      }
      continue;
    }
    if (close_points(t, hi)) break;
    if (next == pieces_.back()) continue;
    breakpoints_.push_back(t);
    pieces_.push_back(next);
    prev = t;
  }
}

PiecewiseFunction1D PiecewiseFunction1D::constant(double lo, double hi, double value,
                                                  std::int64_t tag) {
  return PiecewiseFunction1D(lo, hi, {}, {Piece{0.0, value, tag}});
}

bool PiecewiseFunction1D::bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }

double PiecewiseFunction1D::piece_start(std::size_t i) const {
  return i == 0 ? lo_ : breakpoints_.at(i - 1);
}

double PiecewiseFunction1D::piece_end(std::size_t i) const {
  return i + 1 == pieces_.size() ? hi_ : breakpoints_.at(i);
}

double PiecewiseFunction1D::piece_probe(std::size_t i) const {
  const double a = piece_start(i);
  const double b = piece_end(i);
  if (std::isfinite(a) && std::isfinite(b)) return a + (b - a) / 2.0;
  if (std::isfinite(a)) return a + 1.0;
  if (std::isfinite(b)) return b - 1.0;
  return 0.0;
}

std::size_t PiecewiseFunction1D::piece_index(double x) const {
  if (std::isnan(x) || x < lo_ || x > hi_)
    throw std::out_of_range("piecewise: point outside domain");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin());
}

double PiecewiseFunction1D::operator()(double x) const {
  return pieces_[piece_index(x)].at(x);
}

PiecewiseFunction1D upper_envelope(std::span<const Line1D> lines, double lo, double hi) {
  if (lines.empty()) throw std::invalid_argument("upper_envelope: no candidates");
  if (!(lo < hi)) throw std::invalid_argument("upper_envelope: invalid domain");

  // Which of two lines dominates just to the right of x.
  auto better_right = [](const Line1D& a, const Line1D& b) {
    if (a.slope != b.slope) return a.slope > b.slope;
    if (a.intercept != b.intercept) return a.intercept > b.intercept;
    return a.tag < b.tag;
  };

  std::size_t cur = 0;
  if (std::isinf(lo)) {
    // Far left: smallest slope wins, then largest intercept, then lowest tag.
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto& a = lines[i];
      const auto& b = lines[cur];
      if (a.slope < b.slope || (a.slope == b.slope && (a.intercept > b.intercept ||
                                                       (a.intercept == b.intercept && a.tag < b.tag))))
        cur = i;
    }
  } else {
    double best = -kInf;
    for (const auto& l : lines) best = std::max(best, l.at(lo));
    const double tol = kCmpEps * scale_of(best);
    bool have = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].at(lo) < best - tol) continue;
      if (!have || better_right(lines[i], lines[cur])) cur = i;
      have = true;
    }
  }

  std::vector<double> bps;
  std::vector<Piece> pieces{Piece{lines[cur].slope, lines[cur].intercept, lines[cur].tag}};
  double x = lo;
  while (true) {
    const Line1D& l = lines[cur];
    double next_x = kInf;
    std::size_t next = cur;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const Line1D& m = lines[i];
      if (!(m.slope > l.slope)) continue;
      double xi = (l.intercept - m.intercept) / (m.slope - l.slope);
      if (std::isfinite(x)) xi = std::max(xi, x);
      if (next == cur || (xi < next_x && !close_points(xi, next_x))) {
        next_x = xi;
        next = i;
      } else if (close_points(xi, next_x) && better_right(m, lines[next])) {
        next_x = std::min(next_x, xi);
        next = i;
      }
    }
    if (next == cur || !(next_x < hi)) break;
    if (std::isfinite(x) && close_points(next_x, x)) {
      pieces.back() = Piece{lines[next].slope, lines[next].intercept, lines[next].tag};
    } else {
      bps.push_back(next_x);
      pieces.push_back(Piece{lines[next].slope, lines[next].intercept, lines[next].tag});
      x = next_x;
    }
    cur = next;
  }
  return PiecewiseFunction1D(lo, hi, std::move(bps), std::move(pieces));
}

PiecewiseFunction1D average(std::span<const PiecewiseFunction1D> fns) {
  if (fns.empty()) throw std::invalid_argument("average: no functions");
  const double lo = fns[0].lo();
  const double hi = fns[0].hi();
  for (const auto& f : fns)
    if (!close_points(f.lo(), lo) || !close_points(f.hi(), hi))
      throw std::invalid_argument("average: domain mismatch");

  struct Event {
    double x;
    double dslope;
    double dintercept;
  };
  std::vector<Event> events;
  long double slope = 0.0L;
  long double intercept = 0.0L;
  for (const auto& f : fns) {
    const auto& ps = f.pieces();
    slope += ps[0].slope;
    intercept += ps[0].intercept;
    for (std::size_t i = 0; i < f.breakpoints().size(); ++i)
      events.push_back({f.breakpoints()[i], ps[i + 1].slope - ps[i].slope,
                        ps[i + 1].intercept - ps[i].intercept});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.x < b.x; });

  const long double n = static_cast<long double>(fns.size());
  std::vector<double> bps;
  std::vector<Piece> pieces;
  auto emit = [&] {
    pieces.push_back(Piece{static_cast<double>(slope / n), static_cast<double>(intercept / n), 0});
  };
  emit();
  std::size_t i = 0;
  while (i < events.size()) {
    const double x = events[i].x;
    while (i < events.size() && close_points(events[i].x, x)) {
      slope += events[i].dslope;
      intercept += events[i].dintercept;
      ++i;
    }
    bps.push_back(x);
    emit();
  }
  return merge_equal_values(PiecewiseFunction1D(lo, hi, std::move(bps), std::move(pieces)));
}

PiecewiseFunction1D merge_equal_values(const PiecewiseFunction1D& fn, double tol) {
  const auto& ps = fn.pieces();
  std::vector<double> bps;
  std::vector<Piece> out{ps[0]};
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const Piece& a = out.back();
    const Piece& b = ps[i];
    const bool same = std::fabs(a.slope - b.slope) <= tol * scale_of(a.slope) &&
                      std::fabs(a.intercept - b.intercept) <= tol * scale_of(a.intercept);
    if (same) continue;
    bps.push_back(fn.breakpoints()[i - 1]);
    out.push_back(b);
  }
  return PiecewiseFunction1D(fn.lo(), fn.hi(), std::move(bps), std::move(out));
}

ArgmaxResult argmax(const PiecewiseFunction1D& fn) {
  struct Candidate {
    double x;
    double value;
    bool limit;
  };
  std::vector<Candidate> cands;
  const auto& ps = fn.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Piece& p = ps[i];
    const double a = fn.piece_start(i);
    const double b = fn.piece_end(i);
    const bool last = i + 1 == ps.size();
    if (std::isinf(a)) {
      if (p.slope < 0) throw std::domain_error("argmax: unbounded");
      if (p.slope == 0) cands.push_back({a, p.intercept, false});
    } else {
      cands.push_back({a, p.at(a), false});
    }
    if (std::isinf(b)) {
      if (p.slope > 0) throw std::domain_error("argmax: unbounded");
    } else if (p.slope > 0) {
      cands.push_back({b, p.at(b), !last});
    }
  }
  double sup = -kInf;
  for (const auto& c : cands) sup = std::max(sup, c.value);
  const double tol = kCmpEps * scale_of(sup);
  for (const auto& c : cands)
    if (!c.limit && c.value >= sup - tol) return {c.x, c.value, false};
  for (const auto& c : cands)
    if (c.value >= sup - tol) return {c.x, c.value, true};
  throw std::logic_error("argmax: no candidate");
}

int count_oscillations(const PiecewiseFunction1D& fn, double z) {
  const auto& ps = fn.pieces();
  int count = 0;
  bool have_prev = false;
  bool prev_state = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Piece& p = ps[i];
    const double a = fn.piece_start(i);
    const double b = fn.piece_end(i);
    // State at the left end (limit from the right when a is -inf).
    bool s_start;
    if (std::isinf(a)) {
      s_start = p.slope == 0 ? p.intercept >= z : p.slope < 0;
    } else {
      s_start = p.at(a) >= z;
    }
    // State just before the right end.
    bool s_end;
    if (std::isinf(b)) {
      s_end = p.slope == 0 ? p.intercept >= z : p.slope > 0;
    } else {
      const double v = p.at(b);
      if (v != z) s_end = v > z;
      else s_end = p.slope <= 0;
    }
    if (have_prev && s_start != prev_state) ++count;
    if (s_start != s_end) ++count;
    prev_state = s_end;
    have_prev = true;
    if (i + 1 == ps.size() && std::isfinite(b)) {
      const bool s_hi = p.at(b) >= z;
      if (s_hi != s_end) ++count;
    }
  }
  return count;
}

nlohmann::json to_json(const PiecewiseFunction1D& fn) {
  nlohmann::json j;
  j["lo"] = number_json(fn.lo());
  j["hi"] = number_json(fn.hi());
  j["breakpoints"] = fn.breakpoints();
  auto pieces = nlohmann::json::array();
  for (const auto& p : fn.pieces())
    pieces.push_back({{"slope", p.slope}, {"intercept", p.intercept}, {"tag", p.tag}});
  j["pieces"] = pieces;
  return j;
}

PiecewiseFunction1D piecewise_from_json(const nlohmann::json& j) {
  try {
    std::vector<Piece> pieces;
    for (const auto& p : j.at("pieces"))
      pieces.push_back(Piece{p.at("slope").get<double>(), p.at("intercept").get<double>(),
                             p.value("tag", std::int64_t{0})});
    return PiecewiseFunction1D(json_number(j.at("lo")), json_number(j.at("hi")),
                               j.at("breakpoints").get<std::vector<double>>(), std::move(pieces));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("piecewise JSON: ") + e.what());
  }
}

}  // namespace algotune
