#include "ctising/rc_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace ctising {

uint32_t SpinConfiguration::slit_plus_bits(const ClusterLabelling& lab) const {
    const auto& box = lab.box();
    if (!box.slit_len) throw ContractError("slit readout on a box without a slit");
    uint32_t bits = 0;
    for (int x = 0; x <= *box.slit_len; ++x)
        if (slit_plus(lab, x) > 0) bits |= (1u << x);
    return bits;
}

uint32_t SpinConfiguration::slit_minus_bits(const ClusterLabelling& lab) const {
    const auto& box = lab.box();
    if (!box.slit_len) throw ContractError("slit readout on a box without a slit");
    uint32_t bits = 0;
    for (int x = 0; x <= *box.slit_len; ++x)
        if (slit_minus(lab, x) > 0) bits |= (1u << x);
    return bits;
}

SpinConfiguration assign_spins(const ClusterLabelling& labelling, Rng& rng) {
    if (labelling.label_conflict())
        throw ContractError("assign_spins: differently labelled boundary parts are connected");
    int n = labelling.num_intervals();
    SpinConfiguration out;
    out.spin.assign(size_t(n), 0);
    // one uniform spin per root, drawn in root-index order for determinism
    std::vector<int8_t> root_spin(size_t(n), 0);
    for (int i = 0; i < n; ++i) {
        int r = labelling.root_of(i);
        if (root_spin[size_t(r)] == 0) {
            int forced = labelling.forced_label(r);
            root_spin[size_t(r)] = int8_t(forced != 0 ? forced : rng.sign());
        }
        out.spin[size_t(i)] = root_spin[size_t(r)];
    }
    return out;
}

Configuration resample_given_spins(const ClusterLabelling& labelling,
                                   const SpinConfiguration& spins, double lambda, double delta,
                                   Rng& rng) {
    if (lambda < 0 || delta < 0) throw ContractError("resample_given_spins: negative rate");
    const SpaceTimeBox& box = labelling.box();
    Configuration out;
    int n_lines = labelling.num_lines();
    out.deaths.resize(n_lines);
    out.bridges.resize(std::max(0, box.num_pairs()));

    for (int l = 0; l < n_lines; ++l) {
        const auto& cuts = labelling.cuts(l);
        const auto& is_death = labelling.cut_is_death(l);
        std::vector<double>& deaths = out.deaths[l];
        // forced deaths where the spin flips across an old death
        int base = labelling.first_interval(l);
        for (size_t c = 0; c < cuts.size(); ++c) {
            if (!is_death[c]) continue;  // the slit cut is geometry, not an event
            int below = base + int(c);
            int above = below + 1;
            if (spins.spin[size_t(below)] != spins.spin[size_t(above)]) deaths.push_back(cuts[c]);
        }
        // fresh deaths anywhere on the line
        std::vector<double> fresh = rng.poisson_times(delta, box.t_min, box.t_max);
        if (!fresh.empty()) {
            deaths.insert(deaths.end(), fresh.begin(), fresh.end());
            std::sort(deaths.begin(), deaths.end());
            deaths.erase(std::unique(deaths.begin(), deaths.end()), deaths.end());
        }
        // a fresh death exactly at the slit time would shadow the slit cut
        if (box.is_slit_site(box.site_of_line(l)))
            deaths.erase(std::remove(deaths.begin(), deaths.end(), 0.0), deaths.end());
    }

    for (int p = 0; p < box.num_pairs(); ++p) {
        int x = box.site_of_line(p);
        std::vector<double> cand = rng.poisson_times(lambda, box.t_min, box.t_max);
        std::vector<double>& kept = out.bridges[p];
        for (double t : cand) {
            int sl = spins.spin[size_t(labelling.interval_at(x, t, -1))];
            int sr = spins.spin[size_t(labelling.interval_at(x + 1, t, -1))];
            if (sl == sr) kept.push_back(t);
        }
    }
    return out;
}

ChainState::ChainState(const SpaceTimeBox& box, const BoundaryRule& rule, double lambda,
                       double delta, uint64_t seed)
    : box_(box), rule_(rule), lambda_(lambda), delta_(delta), rng_(Rng::derive(seed, 0xc4a1)) {
    box_.validate();
    if (lambda < 0 || delta < 0) throw ContractError("chain: negative rate");
    // initial configuration by rejection until the spin-boundary conditioning holds
    for (;;) {
        Configuration omega =
            sample_percolation(box_, lambda_, delta_, rng_.next_u64());
        auto lab = std::make_unique<ClusterLabelling>(box_, omega, rule_);
        if (lab->label_conflict()) {
            ++init_rejections_;
            if (init_rejections_ > 100000)
                throw InsufficientDataError("chain: boundary conditioning rejects everything");
            continue;
        }
        config_ = std::make_unique<Configuration>(std::move(omega));
        labelling_ = std::move(lab);
        break;
    }
    spins_ = assign_spins(*labelling_, rng_);
}

void ChainState::rebuild_spins_after_resample(const ClusterLabelling& old_lab,
                                              const SpinConfiguration& old_spins) {
    // the spin function is unchanged by the percolation update; re-index it onto
    // the new intervals via their midpoints
    spins_.spin.assign(size_t(labelling_->num_intervals()), 0);
    for (int l = 0; l < labelling_->num_lines(); ++l) {
        int x = box_.site_of_line(l);
        for (int iv = labelling_->first_interval(l); iv <= labelling_->last_interval(l); ++iv) {
            double lo, hi;
            labelling_->interval_span(iv, lo, hi);
            double mid = 0.5 * (lo + hi);
            spins_.spin[size_t(iv)] = int8_t(old_spins.spin[size_t(old_lab.interval_at(x, mid, -1))]);
        }
    }
}

void ChainState::sweep() {
    SpinConfiguration fresh = assign_spins(*labelling_, rng_);
    Configuration next = resample_given_spins(*labelling_, fresh, lambda_, delta_, rng_);
    auto new_lab = std::make_unique<ClusterLabelling>(box_, next, rule_);
    auto old_lab = std::move(labelling_);
    labelling_ = std::move(new_lab);
    *config_ = std::move(next);
    rebuild_spins_after_resample(*old_lab, fresh);
    ++sweep_count_;
}

void ChainState::save(std::ostream& os) const {
    write_configuration(os, box_, *config_, 0);
    os << "rule " << rule_.kind_name() << '\n';
    os << "sweep " << sweep_count_ << '\n';
    os << "rngkey " << rng_.key() << '\n';
    os << "rngctr " << rng_.counter() << '\n';
    os << "rates ";
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g %.17g", lambda_, delta_);
    os << buf << '\n';
    for (int l = 0; l < labelling_->num_lines(); ++l)
        for (int iv = labelling_->first_interval(l); iv <= labelling_->last_interval(l); ++iv)
            os << "S " << box_.site_of_line(l) << ' ' << (iv - labelling_->first_interval(l)) << ' '
               << int(spins_.spin[size_t(iv)]) << '\n';
}

ChainState ChainState::load(std::istream& is) {
    std::stringstream config_part;
    std::vector<std::tuple<int, int, int>> spin_records;
    std::string line;
    ChainState st;
    std::string rule_name;
    uint64_t rngkey = 0, rngctr = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "S") {
            int x, idx, sp;
            ss >> x >> idx >> sp;
            spin_records.emplace_back(x, idx, sp);
        } else if (tag == "rule") {
            ss >> rule_name;
        } else if (tag == "sweep") {
            ss >> st.sweep_count_;
        } else if (tag == "rngkey") {
            ss >> rngkey;
        } else if (tag == "rngctr") {
            ss >> rngctr;
        } else if (tag == "rates") {
            ss >> st.lambda_ >> st.delta_;
        } else {
            config_part << line << '\n';
        }
    }
    ParsedConfiguration pc = read_configuration(config_part);
    st.box_ = pc.box;
    if (rule_name == "free") st.rule_ = BoundaryRule::free_rule();
    else if (rule_name == "periodic") st.rule_ = BoundaryRule::periodic();
    else if (rule_name == "wired") st.rule_ = BoundaryRule::wired();
    else if (rule_name == "partially_periodic") st.rule_ = BoundaryRule::partially_periodic();
    else if (rule_name == "periodic_wired") st.rule_ = BoundaryRule::periodic_wired();
    else throw ContractError("chain load: unknown rule '" + rule_name + "'");
    st.config_ = std::make_unique<Configuration>(std::move(pc.omega));
    st.labelling_ = std::make_unique<ClusterLabelling>(st.box_, *st.config_, st.rule_);
    st.spins_.spin.assign(size_t(st.labelling_->num_intervals()), 0);
    for (auto& [x, idx, sp] : spin_records) {
        int iv = st.labelling_->first_interval(st.box_.line_of(x)) + idx;
        st.spins_.spin.at(size_t(iv)) = int8_t(sp);
    }
    for (int8_t s : st.spins_.spin)
        if (s == 0) throw ContractError("chain load: missing spin record");
    st.rng_ = Rng(rngkey);
    st.rng_.set_counter(rngctr);
    return st;
}

ImportanceResult importance_estimate(const SpaceTimeBox& box, const BoundaryRule& rule,
                                     double lambda, double delta, double q,
                                     const std::function<double(const SpaceTimeBox&,
                                                                const Configuration&,
                                                                const ClusterLabelling&)>& f,
                                     uint64_t trials, uint64_t seed) {
    if (q < 1.0) throw ContractError("importance_estimate: q must be >= 1");
    if (trials < 1) throw ContractError("importance_estimate: trials must be >= 1");
    std::vector<double> fs(trials), ks(trials);
    int k_max = 0;
    for (uint64_t i = 0; i < trials; ++i) {
        Configuration omega = sample_percolation(box, lambda, delta, Rng::derive(seed, i));
        ClusterLabelling lab(box, omega, rule);
        fs[i] = f(box, omega, lab);
        ks[i] = lab.cluster_count();
        k_max = std::max(k_max, lab.cluster_count());
    }
    // weights rescaled by q^{-k_max} for stability; the ratio is unchanged
    double sw = 0.0, swf = 0.0;
    for (uint64_t i = 0; i < trials; ++i) {
        double w = std::pow(q, ks[i] - k_max);
        sw += w;
        swf += w * fs[i];
    }
    ImportanceResult res;
    res.estimate = swf / sw;
    double sw2 = 0.0, var_num = 0.0;
    for (uint64_t i = 0; i < trials; ++i) {
        double w = std::pow(q, ks[i] - k_max);
        sw2 += w * w;
        double d = fs[i] - res.estimate;
        var_num += w * w * d * d;
    }
    res.se = std::sqrt(var_num) / sw;
    res.effective_samples = sw * sw / sw2;
    res.unreliable = res.effective_samples < 10.0;
    return res;
}

}  // namespace ctising
