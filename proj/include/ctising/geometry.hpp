#pragma once

#include <optional>
#include <string>

#include "ctising/errors.hpp"

namespace ctising {

// A point of the space-time box.  `side` disambiguates points sitting exactly on
// an interior cut (the slit, or a death time): side = -1 selects the interval
// ending at `t`, side = +1 the interval starting at `t`.  For generic times the
// side is irrelevant and 0 is fine.
struct Point {
    int x = 0;
    double t = 0.0;
    int side = 0;
};

// Finite box of Z x R.  Sites x_min..x_max carry time-lines over [t_min, t_max].
// With slit_len = L the vertices of [0,L] x {0} are split into x+ / x- (the line
// is cut at time 0; the cut is not a death).  time_identified glues (x, t_min)
// to (x, t_max) for every site; the gluing is realised by the counting rules.
struct SpaceTimeBox {
    int x_min = 0;
    int x_max = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::optional<int> slit_len;
    bool time_identified = false;

    int num_sites() const { return x_max - x_min + 1; }
    int num_pairs() const { return num_sites() - 1; }
    double height() const { return t_max - t_min; }
    int line_of(int x) const { return x - x_min; }
    int site_of_line(int l) const { return l + x_min; }

    bool is_slit_site(int x) const { return slit_len && x >= 0 && x <= *slit_len; }
    bool contains(int x, double t) const {
        return x >= x_min && x <= x_max && t >= t_min && t <= t_max;
    }

    void validate() const {
        if (x_min > x_max) throw ContractError("box: x_min > x_max");
        if (!(t_min < t_max)) throw ContractError("box: t_min must be < t_max");
        if (slit_len) {
            if (*slit_len < 0) throw ContractError("box: slit_len must be >= 0");
            if (x_min > 0 || *slit_len > x_max)
                throw ContractError("box: slit [0,L] must lie inside the site range");
            if (!(t_min < 0.0 && 0.0 < t_max))
                throw ContractError("box: slit requires t_min < 0 < t_max");
        }
    }

    // The slit box of the reduced-state experiments: sites [-m, m+L], times
    // [-beta/2, beta/2], slit along [0,L] x {0}, top/bottom identified.
    static SpaceTimeBox slit_box(int m, int L, double beta) {
        if (m < 1 || L < 0 || beta <= 0.0) throw ContractError("slit_box: need m>=1, L>=0, beta>0");
        SpaceTimeBox b;
        b.x_min = -m;
        b.x_max = m + L;
        b.t_min = -0.5 * beta;
        b.t_max = 0.5 * beta;
        b.slit_len = L;
        b.time_identified = true;
        b.validate();
        return b;
    }

    static SpaceTimeBox plain(int x_min, int x_max, double t_min, double t_max,
                              bool identified = false) {
        SpaceTimeBox b;
        b.x_min = x_min;
        b.x_max = x_max;
        b.t_min = t_min;
        b.t_max = t_max;
        b.time_identified = identified;
        b.validate();
        return b;
    }
};

}  // namespace ctising
