// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stablab/harness.hpp"

namespace fs = std::filesystem;
using namespace stablab;
using namespace stablab::harness;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string config(const std::string& name) { return std::string(STABLAB_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "stablab_acceptance";
    fs::create_directories(dir);
    return dir / name;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(STABLAB_CLI) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CheckReport* find_check(const RunSummary& s, const std::string& fragment) {
    for (const auto& c : s.checks) {
        if (c.name.find(fragment) != std::string::npos) return &c;
    }
    return nullptr;
}

bool check_satisfied(const RunSummary& s, const std::string& fragment) {
    const CheckReport* c = find_check(s, fragment);
    return c && c->verdict == Verdict::Satisfied;
}

bool all_converged(const RunSummary& s) {
    for (const auto& r : s.rows) {
        if (r.at("status") != "converged") return false;
    }
    return !s.rows.empty();
}

// Criterion 1: backward stabilization of identity + constant 0.5.
RunSummary c1_summary;
Outcome criterion_1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = load_config(config("stability_constant_backward.json"));
    c1_summary = cmd_stability(cfg);
    const double elapsed = seconds_since(t0);
    const auto& s = c1_summary;

    double max_dist = 0.0;
    for (const auto& r : s.rows) max_dist = std::max(max_dist, r.at("distance").get<double>());
    o.require(s.rows.size() == 200, "200 samples");
    o.require(all_converged(s), "every sample converges");
    o.require(max_dist <= 0.5, "max |h(a)-f(a)| <= 0.5");
    o.require(max_dist >= 0.499, "max |h(a)-f(a)| >= 0.499");
    o.require(cfg.checks.exactness_tol == 1e-8, "exactness tol 1e-8");
    o.require(check_satisfied(s, "Jordan *-homomorphism"), "recovered map exact at tol 1e-8");
    o.require(check_satisfied(s, "stability certificate"), "certificate");
    o.require(elapsed <= 5.0, "runtime <= 5 s");
    o.note("max distance " + fmt(max_dist) + ", " + fmt(elapsed) + " s");
    return o;
}

// Criterion 2: the forward power closed form and a forward run.
RunSummary c2_summary;
Outcome criterion_2() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = BoundSpec::power(1.0, 2.0, 2.0, 2.0);
    const double closed = bound_closed_form(spec, 1.0, Direction::Forward);
    const PhiFn phi = [&](const Element& a, const Element& b, const Element& c) {
        return spec.phi(a, b, c);
    };
    const double series =
        bound_series_truncated(phi, Element{{Complex(1.0, 0.0)}}, Direction::Forward, 60).value;
    o.require(std::abs(closed - 7.5) <= 1e-12, "closed form 7.5 within 1e-12");
    o.require(std::abs(series - closed) <= 1e-9, "60-term series within 1e-9");

    const auto cfg = load_config(config("stability_power_forward.json"));
    c2_summary = cmd_stability(cfg);
    const auto& s = c2_summary;
    double min_slack = INFINITY;
    for (const auto& r : s.rows) min_slack = std::min(min_slack, r.at("slack").get<double>());
    const double elapsed = seconds_since(t0);
    o.require(s.rows.size() == 200, "200 samples");
    o.require(all_converged(s), "every sample converges");
    o.require(min_slack >= 0.0, "slack >= 0 on every sample");
    o.require(elapsed <= 10.0, "runtime <= 10 s");
    o.note("closed " + fmt(closed) + ", series " + fmt(series) + ", min slack " +
           fmt(min_slack) + ", " + fmt(elapsed) + " s");
    return o;
}

// Criterion 3: closed form vs series over the grid, psi(t)=t^2 vs p=2.
Outcome criterion_3() {
    Outcome o;
    Json j = Json::parse(R"({"schema": 1, "sampling": {"seed": 0}})");
    const auto s = cmd_bounds_table(parse_config(j));
    int cells = 0;
    double worst = 0.0;
    for (const auto& r : s.rows) {
        if (r.at("control") != "power") continue;
        ++cells;
        worst = std::max(worst, r.at("rel_diff").get<double>());
    }
    o.require(cells == 3 * 6 * 3, "54 power cells");
    o.require(worst <= 1e-9, "closed vs series <= 1e-9 relative");

    int matched = 0;
    double psi_worst = 0.0;
    for (const auto& r : s.rows) {
        if (r.at("control") != "psi" || r.at("direction") != "forward" || r.at("exponent") != 2.0)
            continue;
        for (const auto& q : s.rows) {
            if (q.at("control") == "power" && q.at("direction") == "forward" &&
                q.at("exponent") == 2.0 && q.at("theta") == r.at("theta") &&
                q.at("norm_a") == r.at("norm_a")) {
                ++matched;
                for (const char* col : {"closed_form", "series"}) {
                    const double a = r.at(col).get<double>();
                    const double b = q.at(col).get<double>();
                    psi_worst = std::max(psi_worst, std::abs(a - b) / std::abs(b));
                }
            }
        }
    }
    o.require(matched == 9, "psi t^2 cells paired with power p=2");
    o.require(psi_worst <= 1e-12, "psi t^2 matches power p=2");
    o.require(s.verdict == Verdict::Satisfied, "bounds-table verdict");
    o.note(std::to_string(cells) + " cells, worst rel diff " + fmt(worst) + ", psi/power " +
           fmt(psi_worst));
    return o;
}

// Criterion 4: the six derivation steps and telescoping for exact maps.
Outcome criterion_4() {
    Outcome o;
    for (const char* name : {"lemma_transpose.json", "lemma_unitary.json"}) {
        const auto cfg = load_config(config(name));
        o.require(cfg.sampling.samples == 1000 && cfg.checks.tol == 1e-9, "1000 samples at 1e-9");
        o.require(cfg.sampling.dims == std::vector<std::size_t>({2, 3, 4}), "dims 2-4");
        const auto s = cmd_lemma_check(cfg);
        int steps = 0;
        double worst = 0.0;
        for (const auto& c : s.checks) {
            worst = std::max(worst, c.max_residual);
            if (c.verdict != Verdict::Satisfied) {
                o.require(false, std::string(name) + " " + c.name);
            }
            steps += c.name.find("telescoping") == std::string::npos ? 1 : 0;
        }
        o.require(steps == 18, std::string(name) + ": six steps per dim");
        o.require(find_check(s, "telescoping") != nullptr, std::string(name) + ": telescoping");
        o.note(std::string(name) + " worst residual " + fmt(worst));
    }
    const auto affine = cmd_lemma_check(load_config(config("lemma_affine_shift.json")));
    const CheckReport* first = nullptr;
    for (const auto& c : affine.checks) {
        if (c.verdict == Verdict::Violated) {
            first = &c;
            break;
        }
    }
    o.require(first && first->name.find("f(0)=0") != std::string::npos,
              "affine shift rejected at f(0)=0");
    o.require(first && first->max_residual == 1.0, "witness residual |I| = 1");
    o.require(affine.exit_code == kExitViolated, "affine shift exit 1");
    if (first) o.note("affine witness residual " + fmt(first->max_residual));
    return o;
}

// Criterion 5: decay slopes of the constructed defect maps.
Outcome criterion_5() {
    Outcome o;
    for (const auto& [name, p] : std::vector<std::pair<std::string, double>>{
             {"superstability_p05.json", 0.5}, {"superstability_p09.json", 0.9}}) {
        const auto cfg = load_config(config(name));
        const std::size_t dim = cfg.sampling.dims.front();
        const MapFn f = build_map(cfg.map, dim).as_function();
        const double expected = 2.0 * p - 2.0;
        double worst_slope = 0.0;
        double worst_ratio = 0.0;
        for (int k = 0; k < cfg.sampling.samples; ++k) {
            const Element a = leading_block(
                random_element(cfg.sampling.seed + static_cast<std::uint64_t>(k), dim,
                               cfg.sampling.norm_cap));
            const auto d = superstability_decay(f, a, 64);
            worst_slope = std::max(worst_slope, std::abs(loglog_slope(d, 4, 64) - expected));
            worst_ratio = std::max(worst_ratio, d[63] / (d[0] * std::pow(64.0, expected)));
        }
        o.require(worst_slope <= 0.05, name + ": slope within 0.05");
        o.require(worst_ratio <= 1.1, name + ": d_64 <= 1.1 d_1 64^(2p-2)");
        const auto s = cmd_superstability(cfg);
        o.require(s.verdict == Verdict::Satisfied, name + ": command verdict");
        o.note("p=" + fmt(p) + " |slope-(2p-2)| " + fmt(worst_slope) + " ratio " + fmt(worst_ratio));
    }
    return o;
}

// Criterion 6: forward diverges on a constant defect, backward converges.
Outcome criterion_6() {
    Outcome o;
    const fs::path out = scratch("diverge.json");
    const int rc = run_cli("stability --config " + config("stability_constant_forward.json") +
                           " --out " + out.string());
    o.require(rc == kExitDiverged, "exit code 2");
    double worst_growth = INFINITY;
    int traces = 0;
    if (rc == kExitDiverged) {
        const Json report = Json::parse(slurp(out));
        for (const auto& row : report.at("rows")) {
            if (row.at("status") != "diverged") continue;
            const auto t = row.at("residuals").get<std::vector<double>>();
            ++traces;
            if (t.size() < 6) {
                worst_growth = 0.0;
                continue;
            }
            for (std::size_t k = t.size() - 5; k < t.size(); ++k) {
                worst_growth = std::min(worst_growth, t[k] / t[k - 1]);
            }
        }
    }
    o.require(traces > 0, "diverged traces emitted");
    o.require(worst_growth >= 2.5, "growth >= 2.5 per step over the last 5 steps");

    auto cfg = load_config(config("stability_constant_forward.json"));
    cfg.stabilizer.direction = Direction::Backward;
    cfg.bound = BoundConfig{BoundSpec::constant(0.3), false};
    const auto back = cmd_stability(cfg);
    o.require(all_converged(back), "backward converges on the same input");
    o.require(back.exit_code == kExitSatisfied, "backward exit 0");
    o.note("min growth " + fmt(worst_growth) + " over " + std::to_string(traces) + " traces");
    return o;
}

// Criterion 7: uniqueness across depth and scale for criteria 1-2.
Outcome criterion_7() {
    Outcome o;
    for (const auto& [label, s] : std::vector<std::pair<std::string, const RunSummary*>>{
             {"criterion 1", &c1_summary}, {"criterion 2", &c2_summary}}) {
        const CheckReport* u = find_check(*s, "uniqueness");
        o.require(u && u->verdict == Verdict::Satisfied, label + " uniqueness");
        o.require(u && u->num_samples == 200, label + " uniqueness on all samples");
        if (u) o.note(label + " max discrepancy " + fmt(u->max_residual));
    }
    return o;
}

std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
    }
    return out;
}

// Criterion 8: byte-identical reports across repeated runs.
Outcome criterion_8() {
    Outcome o;
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"lemma-check", "lemma_unitary.json"},
        {"stability", "stability_power_forward.json"},
        {"stability", "stability_constant_forward.json"},
        {"superstability", "superstability_p09.json"},
        {"bounds-table", "bounds_table.json"},
    };
    int compared = 0;
    for (const auto& [cmd, cfg] : runs) {
        for (const char* format : {"json", "csv"}) {
            const std::string ext = std::string(".") + format;
            const fs::path a = scratch("det_a" + ext);
            const fs::path b = scratch("det_b" + ext);
            const std::string args = cmd + " --config " + config(cfg) + " --seed 11 --format " +
                                     format + " --out ";
            const int ra = run_cli(args + a.string());
            const int rb = run_cli(args + b.string());
            o.require(ra == rb && ra != kExitConfigError, cfg + " runs");
            o.require(strip_timestamp(slurp(a)) == strip_timestamp(slurp(b)),
                      cfg + " " + format + " identical");
            if (std::string(format) == "csv" && fs::exists(a.string() + ".checks.csv")) {
                o.require(slurp(a.string() + ".checks.csv") == slurp(b.string() + ".checks.csv"),
                          cfg + " checks csv identical");
            }
            ++compared;
        }
    }
    o.note(std::to_string(compared) + " report pairs compared");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"backward constant-defect reproduction", criterion_1},
        {"forward power closed form and stabilization", criterion_2},
        {"bound duality grid", criterion_3},
        {"additivity derivation suite", criterion_4},
        {"superstability decay", criterion_5},
        {"divergence dichotomy", criterion_6},
        {"uniqueness", criterion_7},
        {"determinism", criterion_8},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
