#include "pfw/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pfw {

std::vector<std::string> ManifoldSpec::coords() const {
    std::vector<std::string> out;
    out.reserve(dimension());
    out.push_back("x0");
    for (int i = 1; i <= pairs; ++i) out.push_back(x_name(i));
    for (int i = 1; i <= pairs; ++i) out.push_back(p_name(i));
    return out;
}

std::optional<Rational> ManifoldSpec::lattice_period(const std::string& coord) const {
    for (int i = 1; i <= pairs; ++i) {
        if (coord == x_name(i)) return x_period[i - 1];
        if (coord == p_name(i)) return p_period[i - 1];
    }
    return std::nullopt;
}

void ManifoldSpec::validate() const {
    if (pairs < 1) throw std::invalid_argument("manifold needs at least one (x, p) pair");
    if (scale.is_zero()) throw std::invalid_argument("scale k must be nonzero");
    if (static_cast<int>(x_period.size()) != pairs ||
        static_cast<int>(p_period.size()) != pairs)
        throw std::invalid_argument("period lists must have one entry per pair");
    for (const auto& per : x_period) {
        if (per && !(Rational(0) < *per))
            throw std::invalid_argument("x period must be positive");
    }
    for (const auto& per : p_period) {
        if (per && !(Rational(0) < *per))
            throw std::invalid_argument("p period must be positive");
    }
    if (x0_period && !(*x0_period > 0.0))
        throw std::invalid_argument("x0 period must be positive");
    if (!(Rational(0) < open_halfwidth))
        throw std::invalid_argument("open halfwidth must be positive");
}

int Covering::overlap_index(int u, int v) const {
    auto it = overlap_idx_.find({u, v});
    return it == overlap_idx_.end() ? -1 : it->second;
}

const Overlap& Covering::overlap(int u, int v) const {
    int idx = overlap_index(u, v);
    if (idx < 0) throw std::invalid_argument("charts do not overlap");
    return overlaps[idx];
}

int Covering::triple_index(int u, int v, int w) const {
    auto it = triple_idx_.find({u, v, w});
    return it == triple_idx_.end() ? -1 : it->second;
}

std::vector<long long> Covering::jump(int a, int b) const {
    if (a == b) return std::vector<long long>(spec.dimension(), 0);
    if (a < b) return overlap(a, b).jump;
    std::vector<long long> j = overlap(b, a).jump;
    for (auto& x : j) x = -x;
    return j;
}

Frame Covering::chart_frame(int chart) const {
    return Frame{charts[chart].id, spec.coords()};
}

int Covering::chart_by_grid(const std::vector<int>& grid_index) const {
    for (size_t i = 0; i < charts.size(); ++i) {
        if (charts[i].grid_index == grid_index) return static_cast<int>(i);
    }
    throw std::invalid_argument("no chart with the requested grid index");
}

void Covering::build_lookup() {
    overlap_idx_.clear();
    triple_idx_.clear();
    for (size_t i = 0; i < overlaps.size(); ++i)
        overlap_idx_[{overlaps[i].u, overlaps[i].v}] = static_cast<int>(i);
    for (size_t i = 0; i < triples.size(); ++i)
        triple_idx_[{triples[i].u, triples[i].v, triples[i].w}] = static_cast<int>(i);
}

namespace {

/// One-axis intersection of two grid charts on a circle of period L with g
/// boxes; returns interval (in a's lift) and the jump j with z_a = z_b + j*L,
/// or nullopt when disjoint. Margin below L/(2g) guarantees at most one j
/// works, so the overlap is connected.
std::optional<std::pair<Interval, long long>> axis_overlap(const Interval& a,
                                                           const Interval& b,
                                                           const Rational& period) {
    for (long long j : {-1LL, 0LL, 1LL}) {
        Rational shift = Rational(j) * period;
        Rational lo = std::max(a.lo, b.lo + shift);
        Rational hi = std::min(a.hi, b.hi + shift);
        if (lo < hi) return std::make_pair(Interval{lo, hi}, j);
    }
    return std::nullopt;
}

std::optional<Interval> plain_intersection(const Interval& a, const Interval& b) {
    Rational lo = std::max(a.lo, b.lo);
    Rational hi = std::min(a.hi, b.hi);
    if (lo < hi) return Interval{lo, hi};
    return std::nullopt;
}

}  // namespace

Covering build_covering(const ManifoldSpec& spec, int grid) {
    spec.validate();
    std::vector<int> grids;
    for (const auto& c : spec.coords()) {
        if (spec.lattice_period(c)) grids.push_back(grid);
    }
    return build_covering(spec, grids);
}

Covering build_covering(const ManifoldSpec& spec, const std::vector<int>& grid_per_coord) {
    spec.validate();
    Covering cov;
    cov.spec = spec;

    const auto coords = spec.coords();
    for (const auto& c : coords) {
        if (spec.lattice_period(c)) cov.gridded_coords.push_back(c);
    }
    if (grid_per_coord.size() != cov.gridded_coords.size())
        throw std::invalid_argument("expected one grid entry per periodic coordinate");
    cov.grid = grid_per_coord;
    for (size_t i = 0; i < cov.grid.size(); ++i) {
        if (cov.grid[i] < 3)
            throw std::invalid_argument("grid must be >= 3 on periodic coordinate " +
                                        cov.gridded_coords[i]);
    }

    // per-coordinate interval catalogue
    std::vector<std::vector<Interval>> slots(coords.size());
    std::vector<int> counts(coords.size(), 1);
    for (size_t ci = 0; ci < coords.size(); ++ci) {
        auto period = spec.lattice_period(coords[ci]);
        if (!period) {
            slots[ci] = {Interval{-spec.open_halfwidth, spec.open_halfwidth}};
            continue;
        }
        auto gpos = std::find(cov.gridded_coords.begin(), cov.gridded_coords.end(),
                              coords[ci]);
        int g = cov.grid[gpos - cov.gridded_coords.begin()];
        counts[ci] = g;
        Rational cell = *period / Rational(g);
        Rational margin = *period / Rational(4LL * g);
        for (int m = 0; m < g; ++m) {
            slots[ci].push_back(Interval{Rational(m) * cell - margin,
                                         Rational(m + 1) * cell + margin});
        }
    }

    // cartesian product of slots -> charts
    std::vector<int> cursor(coords.size(), 0);
    while (true) {
        Chart chart;
        chart.lift.assign(coords.size(), 0);
        std::ostringstream id;
        id << "U";
        for (size_t ci = 0; ci < coords.size(); ++ci) {
            chart.box.push_back(slots[ci][cursor[ci]]);
            if (spec.lattice_period(coords[ci])) {
                chart.grid_index.push_back(cursor[ci]);
                id << "_" << cursor[ci];
            }
        }
        chart.id = id.str();
        if (chart.grid_index.empty()) chart.id = "U";
        cov.charts.push_back(std::move(chart));

        size_t ci = 0;
        for (; ci < coords.size(); ++ci) {
            if (++cursor[ci] < counts[ci]) break;
            cursor[ci] = 0;
        }
        if (ci == coords.size()) break;
    }

    // pairwise overlaps
    for (size_t u = 0; u < cov.charts.size(); ++u) {
        for (size_t v = u + 1; v < cov.charts.size(); ++v) {
            Overlap ov;
            ov.u = static_cast<int>(u);
            ov.v = static_cast<int>(v);
            bool alive = true;
            for (size_t ci = 0; ci < coords.size() && alive; ++ci) {
                auto period = spec.lattice_period(coords[ci]);
                if (!period) {
                    ov.box.push_back(cov.charts[u].box[ci]);
                    ov.jump.push_back(0);
                    continue;
                }
                auto hit = axis_overlap(cov.charts[u].box[ci], cov.charts[v].box[ci],
                                        *period);
                if (!hit) {
                    alive = false;
                    break;
                }
                ov.box.push_back(hit->first);
                ov.jump.push_back(hit->second);
            }
            if (alive) cov.overlaps.push_back(std::move(ov));
        }
    }
    cov.build_lookup();

    // triples: all pairwise-overlapping chart triples with nonempty common box
    for (const auto& ov : cov.overlaps) {
        for (size_t w = ov.v + 1; w < cov.charts.size(); ++w) {
            int iuw = cov.overlap_index(ov.u, static_cast<int>(w));
            int ivw = cov.overlap_index(ov.v, static_cast<int>(w));
            if (iuw < 0 || ivw < 0) continue;
            const Overlap& uw = cov.overlaps[iuw];
            TripleOverlap tri;
            tri.u = ov.u;
            tri.v = ov.v;
            tri.w = static_cast<int>(w);
            bool alive = true;
            for (size_t ci = 0; ci < coords.size() && alive; ++ci) {
                auto box = plain_intersection(ov.box[ci], uw.box[ci]);
                if (!box) {
                    alive = false;
                    break;
                }
                tri.box.push_back(*box);
            }
            if (alive) cov.triples.push_back(std::move(tri));
        }
    }
    cov.build_lookup();
    return cov;
}

bool covers_quotient(const Covering& cov, int samples_per_direction) {
    const auto coords = cov.spec.coords();
    std::vector<int> counts(coords.size(), 1);
    for (size_t ci = 0; ci < coords.size(); ++ci) {
        if (cov.spec.lattice_period(coords[ci])) counts[ci] = samples_per_direction;
    }
    std::vector<int> cursor(coords.size(), 0);
    while (true) {
        // sample point, periodic coordinates spread over one period
        std::vector<Rational> pt(coords.size());
        for (size_t ci = 0; ci < coords.size(); ++ci) {
            auto period = cov.spec.lattice_period(coords[ci]);
            if (period) {
                pt[ci] = *period * Rational(2 * cursor[ci] + 1, 2LL * counts[ci]);
            } else {
                pt[ci] = Rational(0);
            }
        }
        bool hit = false;
        for (const auto& chart : cov.charts) {
            bool inside = true;
            for (size_t ci = 0; ci < coords.size() && inside; ++ci) {
                auto period = cov.spec.lattice_period(coords[ci]);
                if (!period) {
                    inside = chart.box[ci].contains(pt[ci]);
                    continue;
                }
                // membership modulo the lattice
                bool in = false;
                for (long long m : {-1LL, 0LL, 1LL}) {
                    if (chart.box[ci].contains(pt[ci] + Rational(m) * *period)) {
                        in = true;
                        break;
                    }
                }
                inside = in;
            }
            if (inside) {
                hit = true;
                break;
            }
        }
        if (!hit) return false;

        size_t ci = 0;
        for (; ci < coords.size(); ++ci) {
            if (++cursor[ci] < counts[ci]) break;
            cursor[ci] = 0;
        }
        if (ci == coords.size()) break;
    }
    return true;
}

}  // namespace pfw
