#include "gnrpg/config.hpp"

#include <fstream>
#include <sstream>

namespace gnrpg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& path) {
    RunConfig rc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path, lineno, "expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "benchmarks") rc.benchmarks = split_list(val);
            else if (key == "structures") {
                rc.structures.clear();
                for (const auto& s : split_list(val)) {
                    const auto k = pg_kind_from_name(s);
                    if (!k) throw ConfigError(path, lineno, "unknown structure `" + s + "`");
                    rc.structures.push_back(*k);
                }
            }
            else if (key == "bench_dir") rc.bench_dir = val;
            else if (key == "chains") rc.chains = std::stoi(val);
            else if (key == "stages") rc.stages = std::stoi(val);
            else if (key == "v_module") rc.pg.v_module = std::stod(val);
            else if (key == "v_switch") rc.pg.v_switch = std::stod(val);
            else if (key == "ideality") {
                const double n = std::stod(val);
                rc.pg.nmos = default_nmos(33.6, n);
                rc.pg.pmos = default_pmos(67.2, n);
            }
            else if (key == "c_load_f") rc.pg.c_load_f = std::stod(val);
            else if (key == "mosps_vth_offset") rc.pg.mosps_vth_offset = std::stod(val);
            else if (key == "gnr_n_dimer") rc.pg.gnr.n_dimer = std::stoi(val);
            else if (key == "gnr_n_rib") rc.pg.gnr.n_rib = std::stoi(val);
            else if (key == "gnr_w_sp_nm") rc.pg.gnr.w_sp_nm = std::stod(val);
            else if (key == "gnr_l_ch_nm") rc.pg.gnr.l_ch_nm = std::stod(val);
            else if (key == "gnr_l_res_nm") rc.pg.gnr.l_res_nm = std::stod(val);
            else if (key == "gnr_t_ox_top_nm") rc.pg.gnr.t_ox_top_nm = std::stod(val);
            else if (key == "gnr_t_ox_sub_nm") rc.pg.gnr.t_ox_sub_nm = std::stod(val);
            else if (key == "gnr_f_dop") rc.pg.gnr.f_dop = std::stod(val);
            else if (key == "subbands") rc.pg.subband_count = std::stoi(val);
            else if (key == "n0") rc.pg.n0 = std::stod(val);
            else if (key == "beta_cds") rc.pg.beta_cds = std::stod(val);
            else if (key == "vbg_frac") rc.pg.back_gate_bias_frac = std::stod(val);
            else if (key == "wake_frac") rc.pg.wake_threshold_frac = std::stod(val);
            else if (key == "c_vgnr_per_nmos") rc.pg.c_vgnr_per_nmos_f = std::stod(val);
            else if (key == "leak_vectors") rc.pg.leakage_vector_count = std::stoi(val);
            else if (key == "seed") rc.pg.seed = static_cast<unsigned>(std::stoul(val));
            else if (key == "steps") rc.pg.transient_steps = std::stoi(val);
            else if (key == "max_window_s") rc.pg.max_window_s = std::stod(val);
            else if (key == "abstol") rc.sim.abstol = std::stod(val);
            else if (key == "reltol") rc.sim.reltol = std::stod(val);
            else if (key == "gmin") rc.sim.gmin = std::stod(val);
            else if (key == "max_newton_iters") rc.sim.max_newton_iters = std::stoi(val);
            else if (key == "integration") {
                if (val == "trap") rc.sim.integration = Integration::Trapezoidal;
                else if (val == "be") rc.sim.integration = Integration::BackwardEuler;
                else throw ConfigError(path, lineno, "integration must be trap or be");
            }
            else throw ConfigError(path, lineno, "unknown key `" + key + "`");
        } catch (const std::invalid_argument&) {
            throw ConfigError(path, lineno, "bad value for `" + key + "`");
        } catch (const std::out_of_range&) {
            throw ConfigError(path, lineno, "bad value for `" + key + "`");
        }
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

BenchmarkCase load_benchmark(const std::string& name, const RunConfig& cfg) {
    if (name == "invchain")
        return BenchmarkCase{name, make_inverter_chain(cfg.chains, cfg.stages)};
    return BenchmarkCase{name, load_bench_file(cfg.bench_dir + "/" + name + ".bench")};
}

}  // namespace gnrpg
