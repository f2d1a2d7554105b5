#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "optimize.hpp"
#include "power.hpp"
#include "receiver.hpp"

namespace sslr {

/// Configuration problems carry the offending key path so the message lands
/// on the right line of the scenario file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Placement-search settings. The spacing offsets are measured above the
/// frozen focal lengths (l = f + delta).
struct PlacementConfig {
    double f1_set = 0.05;
    double f2_set = 0.05;
    double offset_lbound = 0.0;
    double offset_ubound = 0.006;
    long long n_smax = 100000;
};

/// Distance sweep grid.
struct SweepConfig {
    double d_start = 0.1;
    double d_stop = 6.0;
    double d_step = 0.01;
};

/// Optional fixed geometry; when present the experiments skip the placement
/// search and evaluate this cavity instead.
struct GeometryOverride {
    bool present = false;
    double f1 = 0.0, f2 = 0.0, l1 = 0.0, l2 = 0.0;
};

/// Everything a scenario file can say, with the published defaults filled in.
struct ScenarioConfig {
    std::string description;
    double p_in = 60.0;
    double wavelength = 1064e-9;
    MaterialTable material;
    LossTable losses;
    PVParams pv;
    PDParams pd;
    OptimizerConfig optimizer;
    PlacementConfig placement;
    double l_s = 0.75e-3;
    double a_g_max = 3e-3;
    int multistarts = 5;
    std::vector<double> l_s_list; ///< trade-off sweep, defaults to 0..4.5 mm
    SweepConfig sweep;
    double baseline_f_set = 0.05;
    GeometryOverride geometry;
    std::string out_dir;

    ScenarioConfig() {
        for (int i = 0; i <= 18; ++i)
            l_s_list.push_back(0.25e-3 * i);
    }
};

namespace detail {

using nlohmann::json;

inline void expect_keys(const json& obj, const std::string& path,
                        std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k)
                known = true;
        if (!known)
            throw ConfigError("unknown key '" + path + it.key() + "'");
    }
}

inline double get_num(const json& obj, const std::string& path, const char* key,
                      double fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("key '" + path + key + "' must be a number");
    return v.get<double>();
}

inline long long get_int(const json& obj, const std::string& path, const char* key,
                         long long fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError("key '" + path + key + "' must be an integer");
    return v.get<long long>();
}

inline std::string get_str(const json& obj, const std::string& path, const char* key,
                           const std::string& fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError("key '" + path + key + "' must be a string");
    return v.get<std::string>();
}

inline std::array<double, 4> get_vec4(const json& obj, const std::string& path,
                                      const char* key, std::array<double, 4> fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 4)
        throw ConfigError("key '" + path + key + "' must be an array of 4 numbers");
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i) {
        if (!v[i].is_number())
            throw ConfigError("key '" + path + key + "' must be an array of 4 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

} // namespace detail

/// Parses and schema-checks a scenario JSON document. Unknown keys are
/// rejected with their path; absent keys take the published defaults.
inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
    using detail::expect_keys;
    using detail::get_int;
    using detail::get_num;
    using detail::get_str;
    using detail::get_vec4;

    if (!doc.is_object())
        throw ConfigError("scenario root must be an object");
    expect_keys(doc, "", {"description", "p_in_w", "wavelength_m", "material", "losses",
                          "pv", "pd", "optimizer", "placement", "functional", "tradeoff",
                          "sweep", "baseline", "geometry", "out_dir"});

    ScenarioConfig sc;
    sc.description = get_str(doc, "", "description", "");
    sc.p_in = get_num(doc, "", "p_in_w", sc.p_in);
    sc.wavelength = get_num(doc, "", "wavelength_m", sc.wavelength);
    sc.out_dir = get_str(doc, "", "out_dir", "");

    if (doc.contains("material")) {
        const auto& m = doc.at("material");
        expect_keys(m, "material.", {"i_s_w_per_m2", "eta_c", "d_eff_m_per_v", "n0"});
        sc.material.i_s = get_num(m, "material.", "i_s_w_per_m2", sc.material.i_s);
        sc.material.eta_c = get_num(m, "material.", "eta_c", sc.material.eta_c);
        sc.material.d_eff = get_num(m, "material.", "d_eff_m_per_v", sc.material.d_eff);
        sc.material.n0 = get_num(m, "material.", "n0", sc.material.n0);
    }
    sc.material.lambda = sc.wavelength;

    if (doc.contains("losses")) {
        const auto& l = doc.at("losses");
        expect_keys(l, "losses.",
                    {"gamma_l1", "gamma_l2", "gamma_l3", "gamma_l4", "gamma_shg",
                     "gamma_m2_2nu", "gamma_m3_nu", "gamma_det", "gamma_pv", "gamma_g",
                     "gamma_g_eom", "r_m1", "r_m3_2nu", "alpha_per_m"});
        sc.losses.gamma_l1 = get_num(l, "losses.", "gamma_l1", sc.losses.gamma_l1);
        sc.losses.gamma_l2 = get_num(l, "losses.", "gamma_l2", sc.losses.gamma_l2);
        sc.losses.gamma_l3 = get_num(l, "losses.", "gamma_l3", sc.losses.gamma_l3);
        sc.losses.gamma_l4 = get_num(l, "losses.", "gamma_l4", sc.losses.gamma_l4);
        sc.losses.gamma_shg = get_num(l, "losses.", "gamma_shg", sc.losses.gamma_shg);
        sc.losses.gamma_m2_2nu = get_num(l, "losses.", "gamma_m2_2nu", sc.losses.gamma_m2_2nu);
        sc.losses.gamma_m3_nu = get_num(l, "losses.", "gamma_m3_nu", sc.losses.gamma_m3_nu);
        sc.losses.gamma_det = get_num(l, "losses.", "gamma_det", sc.losses.gamma_det);
        sc.losses.gamma_pv = get_num(l, "losses.", "gamma_pv", sc.losses.gamma_pv);
        sc.losses.gamma_g = get_num(l, "losses.", "gamma_g", sc.losses.gamma_g);
        sc.losses.gamma_g_eom = get_num(l, "losses.", "gamma_g_eom", sc.losses.gamma_g_eom);
        sc.losses.r_m1 = get_num(l, "losses.", "r_m1", sc.losses.r_m1);
        sc.losses.r_m3_2nu = get_num(l, "losses.", "r_m3_2nu", sc.losses.r_m3_2nu);
        sc.losses.alpha = get_num(l, "losses.", "alpha_per_m", sc.losses.alpha);
    }

    if (doc.contains("pv")) {
        const auto& p = doc.at("pv");
        expect_keys(p, "pv.", {"rho_a_per_w", "i0_a", "r_sh_ohm", "r_s_ohm", "n", "n_s", "t_k"});
        sc.pv.rho = get_num(p, "pv.", "rho_a_per_w", sc.pv.rho);
        sc.pv.i0 = get_num(p, "pv.", "i0_a", sc.pv.i0);
        sc.pv.r_sh = get_num(p, "pv.", "r_sh_ohm", sc.pv.r_sh);
        sc.pv.r_s = get_num(p, "pv.", "r_s_ohm", sc.pv.r_s);
        sc.pv.n = get_num(p, "pv.", "n", sc.pv.n);
        sc.pv.n_s = get_num(p, "pv.", "n_s", sc.pv.n_s);
        sc.pv.t = get_num(p, "pv.", "t_k", sc.pv.t);
    }

    if (doc.contains("pd")) {
        const auto& p = doc.at("pd");
        expect_keys(p, "pd.", {"gamma_a_per_w", "i_bk_a", "b_hz", "r_il_ohm", "t_k"});
        sc.pd.gamma = get_num(p, "pd.", "gamma_a_per_w", sc.pd.gamma);
        sc.pd.i_bk = get_num(p, "pd.", "i_bk_a", sc.pd.i_bk);
        sc.pd.b = get_num(p, "pd.", "b_hz", sc.pd.b);
        sc.pd.r_il = get_num(p, "pd.", "r_il_ohm", sc.pd.r_il);
        sc.pd.t = get_num(p, "pd.", "t_k", sc.pd.t);
    }

    if (doc.contains("optimizer")) {
        const auto& o = doc.at("optimizer");
        expect_keys(o, "optimizer.",
                    {"n_itr", "n_smax", "v_lbound_m", "v_ubound_m", "alpha_sc", "d_set_m",
                     "d_min_m", "d_max_m", "a_l1_bound_m", "a_l2_bound_m", "seed"});
        sc.optimizer.n_itr = static_cast<int>(get_int(o, "optimizer.", "n_itr", sc.optimizer.n_itr));
        sc.optimizer.n_smax = get_int(o, "optimizer.", "n_smax", sc.optimizer.n_smax);
        sc.optimizer.v_lbound = get_vec4(o, "optimizer.", "v_lbound_m", sc.optimizer.v_lbound);
        sc.optimizer.v_ubound = get_vec4(o, "optimizer.", "v_ubound_m", sc.optimizer.v_ubound);
        sc.optimizer.alpha_sc = get_num(o, "optimizer.", "alpha_sc", sc.optimizer.alpha_sc);
        sc.optimizer.d_set = get_num(o, "optimizer.", "d_set_m", sc.optimizer.d_set);
        sc.optimizer.d_min = get_num(o, "optimizer.", "d_min_m", sc.optimizer.d_min);
        sc.optimizer.d_max = get_num(o, "optimizer.", "d_max_m", sc.optimizer.d_max);
        sc.optimizer.a_l1_bound = get_num(o, "optimizer.", "a_l1_bound_m", sc.optimizer.a_l1_bound);
        sc.optimizer.a_l2_bound = get_num(o, "optimizer.", "a_l2_bound_m", sc.optimizer.a_l2_bound);
        sc.optimizer.seed =
            static_cast<std::uint64_t>(get_int(o, "optimizer.", "seed",
                                               static_cast<long long>(sc.optimizer.seed)));
    }

    if (doc.contains("placement")) {
        const auto& p = doc.at("placement");
        expect_keys(p, "placement.",
                    {"f1_set_m", "f2_set_m", "offset_lbound_m", "offset_ubound_m", "n_smax"});
        sc.placement.f1_set = get_num(p, "placement.", "f1_set_m", sc.placement.f1_set);
        sc.placement.f2_set = get_num(p, "placement.", "f2_set_m", sc.placement.f2_set);
        sc.placement.offset_lbound =
            get_num(p, "placement.", "offset_lbound_m", sc.placement.offset_lbound);
        sc.placement.offset_ubound =
            get_num(p, "placement.", "offset_ubound_m", sc.placement.offset_ubound);
        sc.placement.n_smax = get_int(p, "placement.", "n_smax", sc.placement.n_smax);
    }

    if (doc.contains("functional")) {
        const auto& f = doc.at("functional");
        expect_keys(f, "functional.", {"l_s_m", "a_g_max_m", "multistarts"});
        sc.l_s = get_num(f, "functional.", "l_s_m", sc.l_s);
        sc.a_g_max = get_num(f, "functional.", "a_g_max_m", sc.a_g_max);
        sc.multistarts = static_cast<int>(get_int(f, "functional.", "multistarts", sc.multistarts));
    }

    if (doc.contains("tradeoff")) {
        const auto& t = doc.at("tradeoff");
        expect_keys(t, "tradeoff.", {"l_s_list_m"});
        if (t.contains("l_s_list_m")) {
            const auto& arr = t.at("l_s_list_m");
            if (!arr.is_array() || arr.empty())
                throw ConfigError("key 'tradeoff.l_s_list_m' must be a non-empty array");
            sc.l_s_list.clear();
            for (const auto& v : arr) {
                if (!v.is_number())
                    throw ConfigError("key 'tradeoff.l_s_list_m' must contain numbers");
                sc.l_s_list.push_back(v.get<double>());
            }
        }
    }

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        expect_keys(s, "sweep.", {"d_start_m", "d_stop_m", "d_step_m"});
        sc.sweep.d_start = get_num(s, "sweep.", "d_start_m", sc.sweep.d_start);
        sc.sweep.d_stop = get_num(s, "sweep.", "d_stop_m", sc.sweep.d_stop);
        sc.sweep.d_step = get_num(s, "sweep.", "d_step_m", sc.sweep.d_step);
    }

    if (doc.contains("baseline")) {
        const auto& b = doc.at("baseline");
        expect_keys(b, "baseline.", {"f_set_m"});
        sc.baseline_f_set = get_num(b, "baseline.", "f_set_m", sc.baseline_f_set);
    }

    if (doc.contains("geometry")) {
        const auto& g = doc.at("geometry");
        expect_keys(g, "geometry.", {"f1_m", "f2_m", "l1_m", "l2_m"});
        for (const char* k : {"f1_m", "f2_m", "l1_m", "l2_m"})
            if (!g.contains(k))
                throw ConfigError(std::string("geometry override needs key 'geometry.") + k + "'");
        sc.geometry.present = true;
        sc.geometry.f1 = get_num(g, "geometry.", "f1_m", 0.0);
        sc.geometry.f2 = get_num(g, "geometry.", "f2_m", 0.0);
        sc.geometry.l1 = get_num(g, "geometry.", "l1_m", 0.0);
        sc.geometry.l2 = get_num(g, "geometry.", "l2_m", 0.0);
    }

    // Cross-field validation beyond per-key typing.
    if (sc.p_in < 0.0)
        throw ConfigError("'p_in_w' must be nonnegative");
    if (sc.wavelength <= 0.0)
        throw ConfigError("'wavelength_m' must be positive");
    try {
        sc.optimizer.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("optimizer block invalid: ") + e.what());
    }
    if (!(sc.placement.offset_lbound < sc.placement.offset_ubound))
        throw ConfigError("placement offsets must satisfy lbound < ubound");
    if (sc.sweep.d_step <= 0.0 || sc.sweep.d_stop < sc.sweep.d_start)
        throw ConfigError("sweep grid must have positive step and d_stop >= d_start");
    for (double ls : sc.l_s_list)
        if (ls < 0.0)
            throw ConfigError("'tradeoff.l_s_list_m' entries must be nonnegative");
    return sc;
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

/// Canonical serialization of the effective configuration: every field is
/// materialized (so writing a default explicitly does not change the hash)
/// and keys are emitted in sorted order with no whitespace. The output
/// directory and free-text description are presentation-only and excluded.
inline std::string canonical_config(const ScenarioConfig& sc) {
    nlohmann::json j;
    j["p_in_w"] = sc.p_in;
    j["wavelength_m"] = sc.wavelength;
    j["material"] = {{"i_s_w_per_m2", sc.material.i_s},
                     {"eta_c", sc.material.eta_c},
                     {"d_eff_m_per_v", sc.material.d_eff},
                     {"n0", sc.material.n0}};
    j["losses"] = {{"gamma_l1", sc.losses.gamma_l1},
                   {"gamma_l2", sc.losses.gamma_l2},
                   {"gamma_l3", sc.losses.gamma_l3},
                   {"gamma_l4", sc.losses.gamma_l4},
                   {"gamma_shg", sc.losses.gamma_shg},
                   {"gamma_m2_2nu", sc.losses.gamma_m2_2nu},
                   {"gamma_m3_nu", sc.losses.gamma_m3_nu},
                   {"gamma_det", sc.losses.gamma_det},
                   {"gamma_pv", sc.losses.gamma_pv},
                   {"gamma_g", sc.losses.gamma_g},
                   {"gamma_g_eom", sc.losses.gamma_g_eom},
                   {"r_m1", sc.losses.r_m1},
                   {"r_m3_2nu", sc.losses.r_m3_2nu},
                   {"alpha_per_m", sc.losses.alpha}};
    j["pv"] = {{"rho_a_per_w", sc.pv.rho}, {"i0_a", sc.pv.i0},   {"r_sh_ohm", sc.pv.r_sh},
               {"r_s_ohm", sc.pv.r_s},     {"n", sc.pv.n},       {"n_s", sc.pv.n_s},
               {"t_k", sc.pv.t}};
    j["pd"] = {{"gamma_a_per_w", sc.pd.gamma},
               {"i_bk_a", sc.pd.i_bk},
               {"b_hz", sc.pd.b},
               {"r_il_ohm", sc.pd.r_il},
               {"t_k", sc.pd.t}};
    j["optimizer"] = {{"n_itr", sc.optimizer.n_itr},
                      {"n_smax", sc.optimizer.n_smax},
                      {"v_lbound_m", sc.optimizer.v_lbound},
                      {"v_ubound_m", sc.optimizer.v_ubound},
                      {"alpha_sc", sc.optimizer.alpha_sc},
                      {"d_set_m", sc.optimizer.d_set},
                      {"d_min_m", sc.optimizer.d_min},
                      {"d_max_m", sc.optimizer.d_max},
                      {"a_l1_bound_m", sc.optimizer.a_l1_bound},
                      {"a_l2_bound_m", sc.optimizer.a_l2_bound},
                      {"seed", sc.optimizer.seed}};
    j["placement"] = {{"f1_set_m", sc.placement.f1_set},
                      {"f2_set_m", sc.placement.f2_set},
                      {"offset_lbound_m", sc.placement.offset_lbound},
                      {"offset_ubound_m", sc.placement.offset_ubound},
                      {"n_smax", sc.placement.n_smax}};
    j["functional"] = {{"l_s_m", sc.l_s},
                       {"a_g_max_m", sc.a_g_max},
                       {"multistarts", sc.multistarts}};
    j["tradeoff"] = {{"l_s_list_m", sc.l_s_list}};
    j["sweep"] = {{"d_start_m", sc.sweep.d_start},
                  {"d_stop_m", sc.sweep.d_stop},
                  {"d_step_m", sc.sweep.d_step}};
    j["baseline"] = {{"f_set_m", sc.baseline_f_set}};
    if (sc.geometry.present)
        j["geometry"] = {{"f1_m", sc.geometry.f1},
                         {"f2_m", sc.geometry.f2},
                         {"l1_m", sc.geometry.l1},
                         {"l2_m", sc.geometry.l2}};
    return j.dump();
}

/// FNV-1a over the canonical serialization, printed as 16 hex digits.
inline std::string config_hash(const ScenarioConfig& sc) {
    const std::string canon = canonical_config(sc);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace sslr
