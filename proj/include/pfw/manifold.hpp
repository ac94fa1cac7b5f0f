#ifndef PFW_MANIFOLD_HPP
#define PFW_MANIFOLD_HPP

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pfw/forms.hpp"

namespace pfw {

struct Interval {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    Rational center() const { return (lo + hi) / Rational(2); }
    bool contains(const Rational& x) const { return lo < x && x < hi; }
    friend bool operator==(const Interval& a, const Interval& b) = default;
};

/// Box-quotient model: coordinates x0, x1..xn, p1..pn. The x^i and p_i
/// directions may be identified by rational lattice periods (torus factors);
/// x0 may carry a real period tau that only the flow experiments see. The
/// structure 1-form is dx0 + k * p_i dx^i.
struct ManifoldSpec {
    int pairs = 1;                                   // n
    Rational scale = Rational(1);                    // k
    std::vector<std::optional<Rational>> x_period;   // size n, nullopt = unbounded
    std::vector<std::optional<Rational>> p_period;   // size n
    std::optional<double> x0_period;                 // tau, real-valued
    Rational open_halfwidth = Rational(8);           // box half-width for unbounded coords

    int dimension() const { return 2 * pairs + 1; }
    std::string x_name(int i) const { return "x" + std::to_string(i); }  // x0..xn
    std::string p_name(int i) const { return "p" + std::to_string(i); }  // p1..pn
    std::vector<std::string> coords() const;

    /// Lattice period of a basic coordinate (x1..xn, p1..pn); nullopt for x0
    /// and unbounded coordinates.
    std::optional<Rational> lattice_period(const std::string& coord) const;

    void validate() const;  // throws std::invalid_argument
};

struct Chart {
    std::string id;
    std::vector<int> grid_index;       // per gridded coordinate
    std::vector<Interval> box;         // per manifold coordinate
    std::vector<long long> lift;       // lattice copy per coordinate, 0 from build
};

/// Pairwise chart intersection. The box is expressed in U's lift; the
/// transition reads z_U = z_V + jump_c * L_c per coordinate.
struct Overlap {
    int u = 0;
    int v = 0;
    std::vector<Interval> box;
    std::vector<long long> jump;
};

struct TripleOverlap {
    int u = 0;
    int v = 0;
    int w = 0;
    std::vector<Interval> box;  // in U's lift
};

class Covering {
public:
    ManifoldSpec spec;
    std::vector<std::string> gridded_coords;  // basic coordinates carrying a grid
    std::vector<int> grid;                    // per gridded coordinate
    std::vector<Chart> charts;
    std::vector<Overlap> overlaps;
    std::vector<TripleOverlap> triples;

    int overlap_index(int u, int v) const;       // u < v, -1 if absent
    const Overlap& overlap(int u, int v) const;  // u < v
    int triple_index(int u, int v, int w) const; // sorted, -1 if absent

    /// Signed transition lookup: z_a = z_b + result_c * L_c.
    std::vector<long long> jump(int a, int b) const;

    Frame chart_frame(int chart) const;
    int chart_by_grid(const std::vector<int>& grid_index) const;

    void build_lookup();

private:
    std::map<std::pair<int, int>, int> overlap_idx_;
    std::map<std::tuple<int, int, int>, int> triple_idx_;
};

/// Grid covering of the periodic basic directions by overlapping boxes.
/// Needs grid >= 3 per gridded coordinate so pairwise intersections are
/// connected boxes and the cover is simple.
Covering build_covering(const ManifoldSpec& spec, int grid);
Covering build_covering(const ManifoldSpec& spec, const std::vector<int>& grid_per_coord);

/// Deterministic sample check that the charts cover the quotient.
bool covers_quotient(const Covering& cov, int samples_per_direction);

}  // namespace pfw

#endif
