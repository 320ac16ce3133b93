#include "ctising/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace ctising {

uint64_t Configuration::death_count() const {
    uint64_t n = 0;
    for (const auto& v : deaths) n += v.size();
    return n;
}

uint64_t Configuration::bridge_count() const {
    uint64_t n = 0;
    for (const auto& v : bridges) n += v.size();
    return n;
}

const char* BoundaryRule::kind_name() const {
    switch (kind) {
        case Kind::Free: return "free";
        case Kind::Periodic: return "periodic";
        case Kind::Wired: return "wired";
        case Kind::PartiallyPeriodic: return "partially_periodic";
        case Kind::PeriodicWired: return "periodic_wired";
    }
    return "?";
}

// Stream ids for per-line substreams.
namespace {
constexpr uint64_t kDeathStream = 0x0d;
constexpr uint64_t kBridgeStream = 0x0b;
}  // namespace

Configuration sample_percolation(const SpaceTimeBox& box, double lambda, double delta,
                                 uint64_t seed) {
    if (lambda < 0.0 || delta < 0.0)
        throw ContractError("sample_percolation: rates must be >= 0");
    std::vector<double> lam(std::max(0, box.num_pairs()), lambda);
    std::vector<double> del(box.num_sites(), delta);
    return sample_percolation(box, lam, del, seed);
}

Configuration sample_percolation(const SpaceTimeBox& box, const std::vector<double>& lambda_pairs,
                                 const std::vector<double>& delta_sites, uint64_t seed) {
    box.validate();
    if (int(delta_sites.size()) != box.num_sites() ||
        int(lambda_pairs.size()) != std::max(0, box.num_pairs()))
        throw ContractError("sample_percolation: rate vector length mismatch");
    for (double d : delta_sites)
        if (d < 0.0) throw ContractError("sample_percolation: delta must be >= 0");
    for (double l : lambda_pairs)
        if (l < 0.0) throw ContractError("sample_percolation: lambda must be >= 0");

    Configuration omega;
    omega.deaths.resize(box.num_sites());
    omega.bridges.resize(std::max(0, box.num_pairs()));
    for (int l = 0; l < box.num_sites(); ++l) {
        Rng r(Rng::derive(seed, kDeathStream, uint64_t(l)));
        omega.deaths[l] = r.poisson_times(delta_sites[l], box.t_min, box.t_max);
    }
    for (int p = 0; p < box.num_pairs(); ++p) {
        Rng r(Rng::derive(seed, kBridgeStream, uint64_t(p)));
        omega.bridges[p] = r.poisson_times(lambda_pairs[p], box.t_min, box.t_max);
    }
    return omega;
}

void validate_configuration(const SpaceTimeBox& box, const Configuration& omega) {
    box.validate();
    if (int(omega.deaths.size()) != box.num_sites() ||
        int(omega.bridges.size()) != std::max(0, box.num_pairs()))
        throw ContractError("configuration: event list shape does not match box");
    auto check_sorted_inside = [&](const std::vector<double>& v, const char* what) {
        double prev = box.t_min;
        for (double t : v) {
            if (!(t > box.t_min && t < box.t_max))
                throw ContractError(std::string(what) + ": time outside box interior");
            if (!(t > prev)) throw ContractError(std::string(what) + ": times not strictly increasing");
            prev = t;
        }
    };
    for (const auto& v : omega.deaths) check_sorted_inside(v, "deaths");
    for (const auto& v : omega.bridges) check_sorted_inside(v, "bridges");
    // a.s. no death shares a time with a bridge at the same or adjacent site
    for (int p = 0; p < box.num_pairs(); ++p) {
        for (double t : omega.bridges[p]) {
            for (int l = p; l <= p + 1; ++l) {
                const auto& d = omega.deaths[l];
                auto it = std::lower_bound(d.begin(), d.end(), t);
                if (it != d.end() && *it == t)
                    throw ContractError("configuration: death coincides with bridge endpoint");
            }
            int x = box.site_of_line(p);
            if (t == 0.0 && (box.is_slit_site(x) || box.is_slit_site(x + 1)))
                throw ContractError("configuration: bridge at the slit time");
        }
    }
}

ClusterLabelling::ClusterLabelling(const SpaceTimeBox& box, const Configuration& omega,
                                   const BoundaryRule& rule)
    : box_(box), rule_(rule) {
    int n = box.num_sites();
    cuts_.resize(n);
    cut_is_death_.resize(n);
    offset_.resize(n);
    for (int l = 0; l < n; ++l) {
        int x = box.site_of_line(l);
        const auto& d = omega.deaths[l];
        auto& c = cuts_[l];
        auto& isd = cut_is_death_[l];
        c.reserve(d.size() + 1);
        isd.reserve(d.size() + 1);
        bool slit = box.is_slit_site(x);
        size_t i = 0;
        while (i < d.size() && d[i] < 0.0) { c.push_back(d[i]); isd.push_back(1); ++i; }
        if (slit) { c.push_back(0.0); isd.push_back(0); }
        while (i < d.size()) {
            if (slit && d[i] == 0.0)
                throw ContractError("configuration: death exactly at the slit time");
            c.push_back(d[i]); isd.push_back(1); ++i;
        }
        offset_[l] = total_intervals_;
        total_intervals_ += int(c.size()) + 1;
    }
    ds_.reset(total_intervals_);

    for (size_t p = 0; p < omega.bridges.size(); ++p) {
        for (double t : omega.bridges[p]) {
            ds_.merge(interval_at(box.site_of_line(int(p)), t, 0),
                      interval_at(box.site_of_line(int(p) + 1), t, 0));
        }
    }

    using Kind = BoundaryRule::Kind;
    bool slit_rule = rule.kind == Kind::PartiallyPeriodic || rule.kind == Kind::PeriodicWired;
    if (slit_rule && !box.slit_len)
        throw ContractError("build_clusters: partially periodic rules require a slit box");

    if (rule.kind == Kind::Periodic || slit_rule) {
        // same-site top/bottom gluing; on a slit line this is the back
        // identification around +-beta/2, the slit cut itself stays open
        for (int l = 0; l < n; ++l) ds_.merge(first_interval(l), last_interval(l));
    } else if (rule.kind == Kind::Wired) {
        for (int l = 1; l < n; ++l) {
            ds_.merge(first_interval(0), first_interval(l));
            ds_.merge(first_interval(0), last_interval(l));
        }
        ds_.merge(first_interval(0), last_interval(0));
    }
    if (rule.kind == Kind::PeriodicWired) {
        int L = *box.slit_len;
        int anchor = slit_plus_interval(0);
        for (int x = 0; x <= L; ++x) {
            ds_.merge(anchor, slit_plus_interval(x));
            ds_.merge(anchor, slit_minus_interval(x));
        }
    }

    for (const auto& g : rule.groups) {
        if (g.points.empty() && g.whole_lines.empty()) continue;
        int anchor = g.points.empty() ? first_interval(box.line_of(g.whole_lines.front()))
                                      : interval_at(g.points.front());
        for (const auto& pt : g.points) ds_.merge(anchor, interval_at(pt));
        for (int x : g.whole_lines) {
            int l = box.line_of(x);
            for (int iv = first_interval(l); iv <= last_interval(l); ++iv) ds_.merge(anchor, iv);
        }
        root_labels_.push_back({ds_.find(anchor), g.label});
    }
    // re-root labels after all merges; detect conflicting labels on one root
    for (auto& rl : root_labels_) rl.first = ds_.find(rl.first);
    for (size_t i = 0; i < root_labels_.size(); ++i)
        for (size_t j = i + 1; j < root_labels_.size(); ++j)
            if (root_labels_[i].first == root_labels_[j].first &&
                root_labels_[i].second != root_labels_[j].second &&
                root_labels_[i].second != 0 && root_labels_[j].second != 0)
                label_conflict_ = true;

    k_ = 0;
    for (int i = 0; i < total_intervals_; ++i)
        if (ds_.find(i) == i) ++k_;
}

int ClusterLabelling::line_of_interval(int iv) const {
    int lo = 0, hi = int(offset_.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (offset_[mid] <= iv) lo = mid; else hi = mid - 1;
    }
    return lo;
}

int ClusterLabelling::interval_at(int x, double t, int side) const {
    if (!box_.contains(x, t)) throw ContractError("interval_at: point outside box");
    int l = box_.line_of(x);
    const auto& c = cuts_[l];
    // index of the first cut >= t
    auto it = std::lower_bound(c.begin(), c.end(), t);
    int idx = int(it - c.begin());
    if (it != c.end() && *it == t) {
        if (side > 0) ++idx;  // interval starting at t
        else if (side == 0)
            throw ContractError("interval_at: point sits on a cut; designate a side");
        // side < 0: the interval ending at t
    }
    return offset_[l] + idx;
}

int ClusterLabelling::slit_plus_interval(int x) const {
    if (!box_.is_slit_site(x)) throw ContractError("slit interval requested off the slit");
    return interval_at(x, 0.0, +1);
}

int ClusterLabelling::slit_minus_interval(int x) const {
    if (!box_.is_slit_site(x)) throw ContractError("slit interval requested off the slit");
    return interval_at(x, 0.0, -1);
}

void ClusterLabelling::interval_span(int iv, double& lo, double& hi) const {
    int l = line_of_interval(iv);
    int idx = iv - offset_[l];
    const auto& c = cuts_[l];
    lo = idx == 0 ? box_.t_min : c[idx - 1];
    hi = idx == int(c.size()) ? box_.t_max : c[idx];
}

int ClusterLabelling::forced_label(int root) const {
    for (const auto& rl : root_labels_)
        if (ds_.find(rl.first) == ds_.find(root) && rl.second != 0) return rl.second;
    return 0;
}

ClusterLabelling build_clusters(const SpaceTimeBox& box, const Configuration& omega,
                                const BoundaryRule& rule) {
    validate_configuration(box, omega);
    return ClusterLabelling(box, omega, rule);
}

bool connected(const ClusterLabelling& labelling, const Point& p, const Point& q) {
    return labelling.same_cluster(labelling.interval_at(p), labelling.interval_at(q));
}

namespace {

// Clusters counted after applying extra merges on a copy of the base structure.
struct CountScratch {
    DisjointSet ds;
    int count() {
        int k = 0;
        for (int i = 0; i < int(ds.parent.size()); ++i)
            if (ds.find(i) == i) ++k;
        return k;
    }
};

}  // namespace

ClusterCounts cluster_counts(const SpaceTimeBox& box, const Configuration& omega) {
    ClusterLabelling base = build_clusters(box, omega, BoundaryRule::free_rule());
    ClusterCounts out;
    out.k_free = base.cluster_count();

    int n = base.num_lines();
    CountScratch per;  // periodic
    per.ds = base.ds_;
    for (int l = 0; l < n; ++l) per.ds.merge(base.first_interval(l), base.last_interval(l));
    out.k_p = per.count();

    CountScratch w;
    w.ds = base.ds_;
    for (int l = 0; l < n; ++l) {
        w.ds.merge(base.first_interval(0), base.first_interval(l));
        w.ds.merge(base.first_interval(0), base.last_interval(l));
    }
    out.k_w = w.count();

    if (box.slit_len) {
        out.k_pp = out.k_p;  // the slit cut is part of the geometry
        CountScratch pw;
        pw.ds = per.ds;
        int anchor = base.slit_plus_interval(0);
        for (int x = 0; x <= *box.slit_len; ++x) {
            pw.ds.merge(anchor, base.slit_plus_interval(x));
            pw.ds.merge(anchor, base.slit_minus_interval(x));
        }
        out.k_pw = pw.count();
    } else {
        out.k_pp = out.k_p;
        out.k_pw = out.k_w;
    }
    return out;
}

Estimate estimate_connectivity(double lambda, double delta, int m, uint64_t trials,
                               uint64_t seed) {
    if (m < 0) throw ContractError("estimate_connectivity: m must be >= 0");
    if (trials < 1) throw ContractError("estimate_connectivity: trials must be >= 1");
    if (m == 0) return {1.0, 0.0};  // I touches the boundary of the degenerate box

    SpaceTimeBox box = SpaceTimeBox::plain(-m, m, -double(m), double(m));
    uint64_t hits = 0;
    std::vector<int> iroots;
    for (uint64_t tr = 0; tr < trials; ++tr) {
        Configuration omega = sample_percolation(box, lambda, delta, Rng::derive(seed, tr));
        ClusterLabelling lab(box, omega, BoundaryRule::free_rule());
        // roots of intervals overlapping I = {0} x [-1/2, 1/2]
        iroots.clear();
        int lo_iv = lab.interval_at(0, -0.5, +1);
        int hi_iv = lab.interval_at(0, 0.5, -1);
        for (int iv = lo_iv; iv <= hi_iv; ++iv) iroots.push_back(lab.root_of(iv));
        auto touches_i = [&](int j) {
            int r = lab.root_of(j);
            for (int ir : iroots)
                if (ir == r) return true;
            return false;
        };
        bool hit = false;
        for (int l = 0; l < lab.num_lines() && !hit; ++l) {
            int x = box.site_of_line(l);
            if (x == -m || x == m) {
                for (int j = lab.first_interval(l); j <= lab.last_interval(l) && !hit; ++j)
                    if (touches_i(j)) hit = true;
            } else if (touches_i(lab.first_interval(l)) || touches_i(lab.last_interval(l))) {
                hit = true;
            }
        }
        if (hit) ++hits;
    }
    double p = double(hits) / double(trials);
    return {p, binomial_se(p, trials)};
}

int external_cluster_count(const SpaceTimeBox& box, const Configuration& omega,
                           const SpaceTimeBox& tau_box, const Configuration& tau) {
    box.validate();
    tau_box.validate();
    if (tau_box.x_min > box.x_min || tau_box.x_max < box.x_max || tau_box.t_min > box.t_min ||
        tau_box.t_max < box.t_max)
        throw ContractError("external_cluster_count: tau box must enclose the box");
    // composite event lists on the enclosing box; tau must be admissible off box
    auto inside_box = [&](int x, double t) {
        return x >= box.x_min && x <= box.x_max && t > box.t_min && t < box.t_max;
    };
    for (int l = 0; l < tau_box.num_sites(); ++l) {
        int x = tau_box.site_of_line(l);
        for (double t : tau.deaths[l])
            if (inside_box(x, t))
                throw ContractError("external_cluster_count: tau death inside the box");
    }
    for (int p = 0; p < tau_box.num_pairs(); ++p) {
        int x = tau_box.site_of_line(p);
        for (double t : tau.bridges[p])
            if (inside_box(x, t) && inside_box(x + 1, t))
                throw ContractError("external_cluster_count: tau bridge inside the box");
    }
    Configuration comp = tau;
    for (int l = 0; l < box.num_sites(); ++l) {
        int x = box.site_of_line(l);
        auto& dst = comp.deaths[tau_box.line_of(x)];
        dst.insert(dst.end(), omega.deaths[l].begin(), omega.deaths[l].end());
        std::sort(dst.begin(), dst.end());
    }
    for (int p = 0; p < box.num_pairs(); ++p) {
        int x = box.site_of_line(p);
        auto& dst = comp.bridges[tau_box.line_of(x)];
        dst.insert(dst.end(), omega.bridges[p].begin(), omega.bridges[p].end());
        std::sort(dst.begin(), dst.end());
    }
    ClusterLabelling lab(tau_box, comp, BoundaryRule::free_rule());
    // box's own top/bottom periodic identification
    DisjointSet ds;
    ds.reset(lab.num_intervals());
    for (int i = 0; i < lab.num_intervals(); ++i) ds.parent[i] = lab.root_of(i);
    for (int x = box.x_min; x <= box.x_max; ++x) {
        ds.merge(lab.interval_at(x, box.t_min, +1), lab.interval_at(x, box.t_max, -1));
    }
    // count roots with at least one interval intersecting the box
    std::unordered_set<int> roots;
    for (int iv = 0; iv < lab.num_intervals(); ++iv) {
        int l = lab.line_of_interval(iv);
        int x = tau_box.site_of_line(l);
        if (x < box.x_min || x > box.x_max) continue;
        double lo, hi;
        lab.interval_span(iv, lo, hi);
        if (hi < box.t_min || lo > box.t_max) continue;
        roots.insert(ds.find(iv));
    }
    return int(roots.size());
}

void write_configuration(std::ostream& os, const SpaceTimeBox& box, const Configuration& omega,
                         uint64_t seed) {
    char buf[64];
    os << "# ctising configuration v1\n";
    os << "box " << box.x_min << ' ' << box.x_max << ' ';
    snprintf(buf, sizeof buf, "%.17g %.17g", box.t_min, box.t_max);
    os << buf << ' ' << (box.slit_len ? *box.slit_len : -1) << ' '
       << (box.time_identified ? 1 : 0) << '\n';
    os << "seed " << seed << '\n';
    for (int l = 0; l < box.num_sites(); ++l)
        for (double t : omega.deaths[l]) {
            snprintf(buf, sizeof buf, "%.17g", t);
            os << "D " << box.site_of_line(l) << ' ' << buf << '\n';
        }
    for (int p = 0; p < box.num_pairs(); ++p)
        for (double t : omega.bridges[p]) {
            snprintf(buf, sizeof buf, "%.17g", t);
            os << "B " << box.site_of_line(p) << ' ' << buf << '\n';
        }
}

ParsedConfiguration read_configuration(std::istream& is) {
    ParsedConfiguration out;
    std::string line;
    bool have_box = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "box") {
            int slit, ident;
            ss >> out.box.x_min >> out.box.x_max >> out.box.t_min >> out.box.t_max >> slit >> ident;
            if (!ss) throw ContractError("read_configuration: malformed box header");
            if (slit >= 0) out.box.slit_len = slit;
            out.box.time_identified = ident != 0;
            out.box.validate();
            out.omega.deaths.assign(out.box.num_sites(), {});
            out.omega.bridges.assign(std::max(0, out.box.num_pairs()), {});
            have_box = true;
        } else if (tag == "seed") {
            ss >> out.seed;
        } else if (tag == "D" || tag == "B") {
            if (!have_box) throw ContractError("read_configuration: record before box header");
            int x;
            double t;
            ss >> x >> t;
            if (!ss) throw ContractError("read_configuration: malformed record");
            if (tag == "D") out.omega.deaths.at(out.box.line_of(x)).push_back(t);
            else out.omega.bridges.at(out.box.line_of(x)).push_back(t);
        } else if (tag == "S") {
            continue;  // spin records are handled by the chain checkpoint reader
        } else {
            throw ContractError("read_configuration: unknown record '" + tag + "'");
        }
    }
    if (!have_box) throw ContractError("read_configuration: missing box header");
    validate_configuration(out.box, out.omega);
    return out;
}

}  // namespace ctising
