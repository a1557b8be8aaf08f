#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "stablab/harness.hpp"

namespace stablab::harness {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::size_t max_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("STABLAB_MAX_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) {
            n = std::min(n, static_cast<std::size_t>(cap));
        }
    }
    return n;
}

Verdict combine(const std::vector<CheckReport>& reports) {
    Verdict v = Verdict::Vacuous;
    for (const auto& r : reports) {
        if (r.verdict == Verdict::Violated) {
            return Verdict::Violated;
        }
        if (r.verdict == Verdict::Satisfied) {
            v = Verdict::Satisfied;
        }
    }
    return v;
}

namespace {

Json json_number(double x) {
    // JSON has no infinities; nlohmann would write null silently.
    if (std::isfinite(x)) return x;
    return format_double(x);
}

std::string csv_cell(const OrderedJson& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char ch : s) {
            if (ch == '"') quoted += '"';
            quoted += ch;
        }
        return quoted + "\"";
    }
    return v.dump();
}

double witness_norm(const std::optional<Witness>& w, int which) {
    if (!w) return 0.0;
    const Element& e = which == 0 ? w->a : which == 1 ? w->b : w->c;
    return e.dim() == 0 ? 0.0 : op_norm(e);
}

}  // namespace

Json check_report_to_json(const CheckReport& r) {
    Json j;
    j["name"] = r.name;
    j["max_residual"] = json_number(r.max_residual);
    j["worst_slack"] = json_number(r.worst_slack);
    j["num_samples"] = r.num_samples;
    j["verdict"] = to_string(r.verdict);
    if (r.worst_witness) {
        Json w;
        w["a"] = element_to_json(r.worst_witness->a);
        w["b"] = element_to_json(r.worst_witness->b);
        w["c"] = element_to_json(r.worst_witness->c);
        if (r.worst_witness->mu) {
            w["mu"] = Json::array({r.worst_witness->mu->real(), r.worst_witness->mu->imag()});
        }
        w["norms"] = Json::array({witness_norm(r.worst_witness, 0), witness_norm(r.worst_witness, 1),
                                  witness_norm(r.worst_witness, 2)});
        j["worst_witness"] = std::move(w);
    } else {
        j["worst_witness"] = nullptr;
    }
    return j;
}

OrderedJson RunSummary::to_json() const {
    OrderedJson j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["config_digest"] = config_digest;
    j["timestamp"] = timestamp;
    j["verdict"] = to_string(verdict);
    j["exit_code"] = exit_code;
    OrderedJson checks_json = OrderedJson::array();
    for (const auto& c : checks) {
        checks_json.push_back(OrderedJson::parse(check_report_to_json(c).dump()));
    }
    j["checks"] = std::move(checks_json);
    j["columns"] = columns;
    j["rows"] = rows;
    j["notes"] = notes;
    return j;
}

std::string RunSummary::checks_csv() const {
    std::string out = "name,max_residual,worst_slack,verdict,num_samples,witness_norm_a,"
                      "witness_norm_b,witness_norm_c\n";
    for (const auto& c : checks) {
        out += csv_cell(OrderedJson(c.name)) + "," + format_double(c.max_residual) + "," +
               format_double(c.worst_slack) + "," + to_string(c.verdict) + "," +
               std::to_string(c.num_samples) + "," + format_double(witness_norm(c.worst_witness, 0)) +
               "," + format_double(witness_norm(c.worst_witness, 1)) + "," +
               format_double(witness_norm(c.worst_witness, 2)) + "\n";
    }
    return out;
}

std::string RunSummary::rows_csv() const {
    if (rows.empty()) {
        return checks_csv();
    }
    std::string out;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        out += (k ? "," : "") + columns[k];
    }
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (k) out += ",";
            if (row.contains(columns[k])) out += csv_cell(row.at(columns[k]));
        }
        out += "\n";
    }
    return out;
}

void write_summary(const RunSummary& s, OutputFormat format, const std::string& path) {
    auto write_file = [](const std::string& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + p + "'");
        }
        out << text;
    };
    if (format == OutputFormat::Json) {
        write_file(path, s.to_json().dump(2) + "\n");
        return;
    }
    write_file(path, s.rows_csv());
    if (!s.rows.empty()) {
        write_file(path + ".checks.csv", s.checks_csv());
    }
}

}  // namespace stablab::harness
