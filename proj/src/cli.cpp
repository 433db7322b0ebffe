#include "reslab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "reslab/airy.hpp"
#include "reslab/irrational.hpp"
#include "reslab/lattice.hpp"
#include "reslab/numtheory.hpp"
#include "reslab/parallel.hpp"
#include "reslab/picard.hpp"
#include "reslab/strichartz.hpp"

#ifndef RESLAB_VERSION
#define RESLAB_VERSION "0.0.0"
#endif

namespace reslab {

std::string artifact_version() { return RESLAB_VERSION; }

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public DomainError {
public:
    using DomainError::DomainError;
    const char* kind() const noexcept override { return "usage"; }
};

Json jcount(Count c) {
    if (c.raw() <= std::numeric_limits<std::uint64_t>::max()) return c.to_u64();
    return c.to_string();
}

Json jbig(const BigInt& x) {
    if (x.fits_slong_p()) return static_cast<std::int64_t>(x.get_si());
    return x.get_str();
}

// Digits after the decimal point are those of %.17g, enough to round-trip.
std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double log10_of(const BigInt& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    long e = 0;
    const double d = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log10(std::fabs(d)) + static_cast<double>(e) * std::log10(2.0);
}

struct PlotSpec {
    std::string x, y, title;
    bool logx = false;
};

struct Report {
    std::string subcommand;
    Json parameters = Json::object();
    std::vector<Json> rows;
    Json errors = Json::array();
    std::optional<PlotSpec> plot;
};

std::string csv_cell(const Json& v) {
    std::string s;
    if (v.is_null()) return "";
    if (v.is_string()) s = v.get<std::string>();
    else if (v.is_boolean()) s = v.get<bool>() ? "true" : "false";
    else if (v.is_number_float()) s = format_double(v.get<double>());
    else s = v.dump();
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string render_csv(const Report& r) {
    std::vector<std::string> columns;
    for (const auto& row : r.rows)
        for (const auto& item : row.items())
            if (std::find(columns.begin(), columns.end(), item.key()) == columns.end()) columns.push_back(item.key());
    if (columns.empty()) columns.push_back("subcommand");
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + csv_cell(columns[i]);
    s += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) s += ',';
            if (row.contains(columns[i])) s += csv_cell(row.at(columns[i]));
        }
        s += '\n';
    }
    return s;
}

Json manifest_core(const Report& r, std::uint64_t seed) {
    Json m = Json::object();
    m["subcommand"] = r.subcommand;
    m["parameters"] = r.parameters;
    m["seed"] = seed;
    m["artifactVersion"] = artifact_version();
    return m;
}

std::string render_json(const Report& r, std::uint64_t seed) {
    Json j = Json::object();
    j["manifest"] = manifest_core(r, seed);
    j["rows"] = r.rows;
    j["errors"] = r.errors;
    return j.dump(2) + "\n";
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string plot_script(const PlotSpec& p, const std::string& csv_path) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << p.x << "'\n"
      << "set ylabel '" << p.y << "'\n"
      << "set title '" << p.title << "'\n";
    if (p.logx) s << "set logscale x 2\n";
    s << "plot '" << csv_path << "' using '" << p.x << "':'" << p.y << "' with linespoints title '" << p.y << "'\n";
    return s.str();
}

// ---------------------------------------------------------------------------
// Arguments

struct Options {
    int dim = 2;
    std::int64_t n_box = 8;
    std::int64_t m = 1;
    std::string k;
    std::optional<double> t;
    std::string gamma = "e";
    std::string method;
    double gap = 4.0;
    std::string format = "csv";
    std::string out;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    bool emit_plot = false;
    std::string n_target;
    std::size_t depth = kDefaultWitnessDepth;
};

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> xs;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t end = std::min(s.find(',', pos), s.size());
        std::int64_t v = 0;
        const char* b = s.data() + pos;
        const char* e = s.data() + end;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e || b == e) throw UsageError("malformed integer list '" + s + "'");
        xs.push_back(v);
        pos = end + 1;
    }
    return xs;
}

Freq parse_anchor(const std::string& s, int dim) {
    if (s.empty()) {
        Freq f = Freq::from_vector(std::vector<std::int64_t>(static_cast<std::size_t>(dim), 0));
        return f;
    }
    const auto xs = parse_int_list(s);
    if (static_cast<int>(xs.size()) != dim)
        throw UsageError("--k needs " + std::to_string(dim) + " components, got '" + s + "'");
    return Freq::from_vector(xs);
}

BigInt parse_big(const std::string& s, const char* flag) {
    BigInt x;
    const std::string body = (!s.empty() && s[0] == '+') ? s.substr(1) : s;
    if (body.empty() || x.set_str(body, 10) != 0) throw UsageError(std::string(flag) + " expects an integer, got '" + s + "'");
    return x;
}

double require_t(const Options& o, double fallback) { return o.t ? *o.t : fallback; }

// ---------------------------------------------------------------------------
// Subcommands

Json count_row(const ResonanceCount& rc) {
    Json row = Json::object();
    row["set"] = to_string(rc.kind);
    row["dim"] = rc.box.dim;
    row["N"] = rc.box.radius;
    row["k"] = rc.anchor ? rc.anchor->to_string() : "";
    row["method"] = to_string(rc.method);
    row["count"] = jcount(rc.count);
    return row;
}

ResonanceCount count_for(int dim, std::int64_t n, const Freq& k, const std::string& method) {
    const FrequencyBox box(dim, n);
    switch (dim) {
        case 1: return count_gamma_prime_1d(box, k[0], method.empty() ? CountMethod::mitm : parse_count_method(method));
        case 2: return count_gamma_2d(box, k, method.empty() ? CountMethod::fast : parse_count_method(method));
        case 3: return count_gamma_dprime_3d(box, k, method.empty() ? CountMethod::mitm : parse_count_method(method));
    }
    throw UsageError("--dim must be 1, 2 or 3");
}

void resonance_count(const Options& o, Report& r) {
    const Freq k = parse_anchor(o.k, o.dim);
    r.parameters = {{"dim", o.dim}, {"N", o.n_box}, {"k", k.to_string()}, {"method", o.method.empty() ? "default" : o.method}};
    r.rows.push_back(count_row(count_for(o.dim, o.n_box, k, o.method)));
}

// |Gamma(0)| over a doubling sequence of boxes, then a seeded anchor sample.
void resonance_scan(const Options& o, Report& r) {
    r.parameters = {{"dim", o.dim}, {"N", o.n_box}, {"method", o.method.empty() ? "default" : o.method}};
    if (o.dim < 1 || o.dim > 3) throw UsageError("--dim must be 1, 2 or 3");
    if (o.n_box < 1) throw DomainError("--N must be >= 1");
    std::vector<std::int64_t> sizes;
    for (std::int64_t s = 2; s < o.n_box; s *= 2) sizes.push_back(s);
    sizes.push_back(o.n_box);
    const Freq zero = parse_anchor("", o.dim);
    const char* normaliser = o.dim == 1 ? "N^3 log N" : o.dim == 2 ? "N^2 log N" : "N^4";
    for (std::int64_t s : sizes) {
        Json row = {{"row", "growth"}};
        row.update(count_row(count_for(o.dim, s, zero, o.method)));
        const double nd = static_cast<double>(s);
        const double scale = o.dim == 1 ? nd * nd * nd * std::log(nd) : o.dim == 2 ? nd * nd * std::log(nd) : nd * nd * nd * nd;
        row["normaliser"] = normaliser;
        row["normalised"] = row["count"].is_number() ? Json(row["count"].get<double>() / scale) : Json();
        r.rows.push_back(row);
    }
    std::mt19937_64 rng(o.seed);
    const std::int64_t h = o.n_box / 2;
    const auto side = static_cast<std::uint64_t>(2 * h + 1);
    for (int i = 0; i < 20; ++i) {
        std::vector<std::int64_t> c;
        for (int d = 0; d < o.dim; ++d) c.push_back(static_cast<std::int64_t>(rng() % side) - h);
        Json row = {{"row", "anchor"}};
        row.update(count_row(count_for(o.dim, o.n_box, Freq::from_vector(c), o.method)));
        r.rows.push_back(row);
    }
    r.plot = PlotSpec{"N", "normalised", "resonant count growth", true};
}

void strichartz(const Options& o, Report& r) {
    const CountMethod method = o.method.empty() ? CountMethod::fast : parse_count_method(o.method);
    r.parameters = {{"dim", o.dim}, {"N", o.n_box}, {"m", o.m}, {"method", to_string(method)}};
    NormReport nr;
    switch (o.dim) {
        case 1: nr = l6_norm_1d(o.n_box, o.m, method); break;
        case 2: nr = l4_norm_2d(o.n_box, o.m, method); break;
        case 3: nr = l4_norm_3d(o.n_box, method); break;
        default: throw UsageError("--dim must be 1, 2 or 3");
    }
    Json row = Json::object();
    row["norm"] = to_string(nr.kind);
    row["N"] = nr.n;
    row["m"] = nr.m;
    row["method"] = to_string(nr.method);
    row["resonant_tuples"] = jcount(nr.resonant_tuple_count);
    row["norm_powered"] = nr.norm_powered;
    row["ratio_to_log"] = nr.ratio_to_log;
    if (o.dim == 3) {
        row["per_n"] = nr.per_n;
        row["per_n_packet"] = nr.per_n_packet;
    }
    if (o.dim == 2) row["half_box_gamma_sum"] = jcount(gamma_half_box_sum(o.n_box));
    r.rows.push_back(row);
}

void picard(const Options& o, Report& r) {
    const WavePacketSpec spec{o.dim, o.m, o.n_box};
    spec.validate(2);
    const double t = require_t(o, 2 * pi / static_cast<double>(o.m * o.m));
    PicardRoute route = PicardRoute::automatic;
    if (o.method == "brute") route = PicardRoute::full_sum;
    else if (!o.method.empty() && o.method != "fast") throw UsageError("picard accepts --method brute or fast");
    r.parameters = {{"dim", o.dim}, {"N", o.n_box}, {"m", o.m}, {"t", t}, {"method", o.method.empty() ? "fast" : o.method}};
    const CoefficientTable table = picard_coefficients(spec, t, route);
    for (const auto& e : table.entries) {
        Json row = Json::object();
        row["row"] = "coefficient";
        row["k"] = e.anchor.to_string();
        row["frequency"] = e.frequency.to_string();
        row["re"] = e.value.real();
        row["im"] = e.value.imag();
        row["abs"] = std::abs(e.value);
        r.rows.push_back(row);
    }
    Json row = Json::object();
    row["row"] = "norm";
    row["route"] = to_string(table.route);
    row["N"] = o.n_box;
    row["m"] = o.m;
    row["t"] = t;
    row["l2_norm"] = table.l2_norm();
    row["l2_over_log"] = o.n_box > 1 ? Json(table.l2_norm() / std::log(static_cast<double>(o.n_box))) : Json();
    row["m2_l2_norm"] = static_cast<double>(o.m * o.m) * table.l2_norm();
    if (is_full_period_multiple(t, o.m) && t > 0)
        row["certificate"] = lower_bound_certificate(o.dim, o.n_box, o.m);
    r.rows.push_back(row);
}

Json witness_row(const ApproximationWitness& w) {
    Json row = Json::object();
    row["row"] = "witness";
    row["gamma"] = w.gamma.to_string();
    row["N"] = w.n;
    row["p"] = jbig(w.p);
    row["q"] = jbig(w.q);
    row["log10_q"] = log10_of(w.q);
    row["convergent_index"] = w.convergent_index;
    row["multiplier"] = jbig(w.multiplier);
    row["defect_lo"] = to_double(w.defect.lo());
    row["defect_hi"] = to_double(w.defect.hi());
    row["defect_upper"] = w.defect_upper();
    row["quotients_scanned"] = static_cast<std::uint64_t>(w.quotients_scanned);
    return row;
}

void irrational(const Options& o, Report& r) {
    const GammaPreset gamma = GammaPreset::parse(o.gamma);
    r.parameters = {{"gamma", gamma.to_string()}, {"N", o.n_box}, {"depth", static_cast<std::uint64_t>(o.depth)}};
    if (!o.t) {
        r.rows.push_back(witness_row(find_dc_witness(gamma, o.n_box, o.depth)));
        return;
    }
    r.parameters["t"] = *o.t;
    const SplitReport s = picard_split(gamma, o.n_box, *o.t, o.depth);
    r.rows.push_back(witness_row(s.witness));
    for (const auto& a : s.anchors) {
        Json row = Json::object();
        row["row"] = "anchor";
        row["k"] = a.anchor.to_string();
        row["resonant_count"] = jcount(a.resonant_count);
        row["nonresonant_count"] = jcount(a.nonresonant_count);
        row["resonant_re"] = a.resonant_sum.real();
        row["resonant_im"] = a.resonant_sum.imag();
        row["nonresonant_scaled_re"] = a.nonresonant_scaled.real();
        row["nonresonant_scaled_im"] = a.nonresonant_scaled.imag();
        row["re"] = a.coefficient.real();
        row["im"] = a.coefficient.imag();
        row["max_resonant_phase"] = a.max_resonant_phase;
        row["min_nonresonant_phase"] = static_cast<double>(a.min_nonresonant_phase);
        r.rows.push_back(row);
    }
    Json row = Json::object();
    row["row"] = "split";
    row["N"] = s.n;
    row["t"] = s.t;
    row["max_resonant_phase"] = s.max_resonant_phase;
    row["min_nonresonant_phase"] = static_cast<double>(s.min_nonresonant_phase);
    row["log10_q2"] = s.log10_q2;
    row["l2_lower_bound"] = s.l2_lower_bound;
    row["ratio_to_t_log"] = s.ratio_to_t_log;
    r.rows.push_back(row);
}

AiryAnchor airy_anchor(const Options& o) {
    if (o.n_target.empty()) throw UsageError("airy count needs --n");
    if (o.k.empty()) throw UsageError("airy count needs --k");
    return {parse_big(o.n_target, "--n"), parse_big(o.k, "--k"), BigInt(static_cast<long>(o.n_box))};
}

void airy_count(const Options& o, Report& r) {
    const AiryAnchor a = airy_anchor(o);
    const AiryMethod method = o.method.empty() ? AiryMethod::divisor : parse_airy_method(o.method);
    r.parameters = {{"n", jbig(a.n)}, {"k", jbig(a.k)}, {"N", o.n_box}, {"method", to_string(method)}, {"gap_factor", o.gap}};
    const auto members = airy_members(a, method);
    Count restricted;
    for (const auto& t : members)
        if (satisfies_gap(t, o.gap)) restricted += 1;
    Json row = Json::object();
    row["n"] = jbig(a.n);
    row["k"] = jbig(a.k);
    row["N"] = o.n_box;
    row["method"] = to_string(method);
    row["count"] = jcount(Count(members.size()));
    row["gap_factor"] = o.gap;
    row["restricted_count"] = jcount(restricted);
    r.rows.push_back(row);
}

void airy_witness(const Options& o, Report& r) {
    if (o.m < 1) throw DomainError("--m must be >= 1");
    r.parameters = {{"m", o.m}};
    const AiryWitness w = build_airy_witness(static_cast<std::uint64_t>(o.m));
    for (std::size_t i = 0; i < w.triples.size(); ++i) {
        const auto& t = w.triples[i];
        Json row = Json::object();
        row["x"] = static_cast<std::uint64_t>(i + 1);
        row["k1"] = jbig(t[0]);
        row["k2"] = jbig(t[1]);
        row["k3"] = jbig(t[2]);
        row["k"] = jbig(w.k);
        row["n"] = jbig(w.n);
        row["M"] = jbig(w.lcm);
        row["m"] = o.m;
        row["ordered_count"] = jcount(w.ordered_count);
        row["unordered_count"] = static_cast<std::uint64_t>(w.triples.size());
        row["N_min"] = jbig(w.n_min);
        row["ratio_to_log"] = w.ratio_to_log;
        row["log_bound_holds"] = w.log_bound_holds;
        r.rows.push_back(row);
    }
}

void airy_scan(const Options& o, Report& r) {
    r.parameters = {{"N", o.n_box}};
    const AiryScanReport s = conditional_l6_scan(o.n_box);
    for (const auto& row_in : s.ninth_rows) {
        Json row = Json::object();
        row["row"] = "ninth";
        row["k"] = row_in.k;
        row["n"] = row_in.k * row_in.k * row_in.k / 9;
        row["count"] = jcount(row_in.count);
        r.rows.push_back(row);
    }
    const std::int64_t nk = s.ninth_argmax_k;
    r.rows.push_back({{"row", "ninth_max"}, {"k", nk}, {"n", nk * nk * nk / 9}, {"count", jcount(s.ninth_max)}});
    r.rows.push_back(
        {{"row", "generic_max"}, {"k", s.generic_argmax_k}, {"n", s.generic_argmax_n}, {"count", jcount(s.generic_max)}});
    r.plot = PlotSpec{"k", "count", "cube-sum multiplicity at n = k^3/9", false};
}

void totient_limit(const Options& o, Report& r) {
    if (o.n_box < 2) throw DomainError("--N must be >= 2");
    r.parameters = {{"N", o.n_box}};
    const TotientSum s = totient_sum_ratio(static_cast<std::uint64_t>(o.n_box));
    Json row = Json::object();
    row["N"] = o.n_box;
    row["sum"] = s.sum;
    row["ratio"] = s.ratio;
    row["limit"] = 6 / (pi * pi);
    row["chain_holds"] = s.chain_holds;
    r.rows.push_back(row);
}

void direction_sum(const Options& o, Report& r) {
    r.parameters = {{"N", o.n_box}};
    const DirectionSum d = direction_sum_3d(o.n_box);
    r.rows.push_back({{"N", d.radius}, {"sum", jcount(d.sum)}, {"ratio", d.ratio}, {"directions", d.directions}});
}

void orthogonal(const Options& o, Report& r) {
    r.parameters = {{"N", o.n_box}};
    const OrthogonalCount c = fast_orthogonal_count(o.n_box);
    const double nd = static_cast<double>(o.n_box);
    Json row = {{"N", c.radius},
                {"total", jcount(c.total)},
                {"zero_row", jcount(c.zero_row)},
                {"quadrant_core", jcount(c.quadrant_core)}};
    row["normalised"] = o.n_box > 1 ? Json(c.total.to_double() / (nd * nd * std::log(nd))) : Json();
    r.rows.push_back(row);
}

int exit_code_for(const Error& e) {
    const std::string kind = e.kind();
    if (kind == "usage" || kind == "domain") return kExitUsage;
    return kExitBudget;
}

Json error_object(const Error& e) {
    Json j = {{"kind", e.kind()}, {"message", e.what()}};
    if (const auto* nf = dynamic_cast<const WitnessNotFound*>(&e)) {
        j["best_p"] = jbig(nf->best_p);
        j["best_q"] = jbig(nf->best_q);
        j["best_defect_lo"] = to_double(nf->best_defect.lo());
        j["best_defect_hi"] = to_double(nf->best_defect.hi());
    }
    return j;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        err << "reslab: cannot write " << path << "\n";
        return false;
    }
    return true;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    Report report;
    std::function<void(const Options&, Report&)> action;

    CLI::App app{"Exact resonance counting and norm-inflation experiments", "reslab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version());

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", o.out, "Write the report to this path");
        sub->add_option("--threads", o.threads, "Data-parallel width (default: hardware)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Seed for randomized scans");
        sub->add_flag("--emit-plot", o.emit_plot, "Write a gnuplot script next to the CSV report");
    };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, auto fn) {
        CLI::App* sub = parent->add_subcommand(name, help);
        common(sub);
        sub->callback([&, name, fn, parent] {
            report.subcommand = (parent == &app ? "" : parent->get_name() + " ") + name;
            action = fn;
        });
        return sub;
    };
    auto dim_opt = [&](CLI::App* s) { s->add_option("--dim", o.dim, "Torus dimension")->check(CLI::IsMember({1, 2, 3})); };
    auto n_opt = [&](CLI::App* s, bool required) {
        auto* opt = s->add_option("--N", o.n_box, "Box radius N");
        if (required) opt->required();
    };
    auto method_opt = [&](CLI::App* s) {
        s->add_option("--method", o.method, "Counting method")->check(CLI::IsMember({"brute", "fast", "mitm", "divisor"}));
    };

    CLI::App* resonance = app.add_subcommand("resonance", "Resonant tuple counts");
    resonance->require_subcommand(1);
    {
        auto* s = leaf(resonance, "count", "Count Gamma(k) for one anchor", resonance_count);
        dim_opt(s);
        n_opt(s, true);
        s->add_option("--k", o.k, "Anchor c1[,c2[,c3]] (default: origin)");
        method_opt(s);
        s = leaf(resonance, "scan", "Growth of the origin count and a seeded anchor sample", resonance_scan);
        dim_opt(s);
        n_opt(s, true);
        method_opt(s);
    }
    {
        auto* s = leaf(&app, "strichartz", "Space-time norms of the wave packet", strichartz);
        dim_opt(s);
        n_opt(s, true);
        s->add_option("--m", o.m, "Frequency spacing");
        method_opt(s);
        s = leaf(&app, "picard", "Fourier coefficients of the first Picard iterate", picard);
        s->add_option("--dim", o.dim, "Torus dimension")->check(CLI::IsMember({1, 2}));
        n_opt(s, true);
        s->add_option("--m", o.m, "Frequency spacing");
        s->add_option("--t", o.t, "Time (default: one period 2 pi / m^2)");
        method_opt(s);
        s = leaf(&app, "irrational", "Approximation witness and phase split on an irrational torus", irrational);
        s->add_option("--gamma", o.gamma, "Aspect ratio preset: rat:p/q, sqrt:d, e, cf:a1,a2,...");
        n_opt(s, true);
        s->add_option("--t", o.t, "Time for the phase split (omit for the witness only)");
        s->add_option("--depth", o.depth, "Continued-fraction quotients to scan");
    }
    CLI::App* airy = app.add_subcommand("airy", "Cubic-sum resonances");
    airy->require_subcommand(1);
    {
        auto* s = leaf(airy, "count", "Count ordered triples with given sum and cube sum", airy_count);
        s->add_option("--n", o.n_target, "Cube sum n")->required();
        s->add_option("--k", o.k, "Sum k")->required();
        n_opt(s, true);
        method_opt(s);
        s->add_option("--gap-factor", o.gap, "Separation factor for the restricted count")->check(CLI::Range(2.0, 1e300));
        s = leaf(airy, "witness", "Least-common-multiple witness triples", airy_witness);
        s->add_option("--m", o.m, "Number of triples")->required();
        s = leaf(airy, "scan", "Multiplicities at n = k^3/9 and elsewhere", airy_scan);
        n_opt(s, true);
    }
    CLI::App* asymptotics = app.add_subcommand("asymptotics", "Number-theoretic asymptotics");
    asymptotics->require_subcommand(1);
    {
        auto* s = leaf(asymptotics, "totient-limit", "Sum of phi(p)/p^2 against log N", totient_limit);
        n_opt(s, true);
        s = leaf(asymptotics, "direction-sum", "Plane-count sum over primitive directions in 3d", direction_sum);
        n_opt(s, true);
        s = leaf(asymptotics, "orthogonal", "Ordered orthogonal pairs in the square box", orthogonal);
        n_opt(s, true);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    if (o.emit_plot && (o.out.empty() || o.format != "csv")) {
        err << "reslab: --emit-plot needs --out and --format csv\n";
        return kExitUsage;
    }
    set_thread_count(o.threads);
    const unsigned threads_used = thread_count();

    int code = kExitOk;
    try {
        action(o, report);
    } catch (const Error& e) {
        code = exit_code_for(e);
        report.rows.clear();
        report.errors.push_back(error_object(e));
        err << "reslab: " << e.kind() << " error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        code = kExitBudget;
        report.rows.clear();
        report.errors.push_back({{"kind", "internal"}, {"message", e.what()}});
        err << "reslab: " << e.what() << "\n";
    }
    set_thread_count(0);

    if (code != kExitOk && o.format == "csv") return code;
    const std::string text = o.format == "json" ? render_json(report, o.seed) : render_csv(report);
    if (o.out.empty()) {
        out << text;
        return code;
    }
    if (!write_file(o.out, text, err)) return kExitUsage;
    Json manifest = manifest_core(report, o.seed);
    manifest["threadCount"] = threads_used;
    manifest["timestamp"] = utc_timestamp();
    manifest["format"] = o.format;
    manifest["report"] = o.out;
    if (!write_file(o.out + ".manifest.json", manifest.dump(2) + "\n", err)) return kExitUsage;
    if (o.emit_plot && report.plot && code == kExitOk) {
        if (!write_file(o.out + ".gp", plot_script(*report.plot, o.out), err)) return kExitUsage;
    }
    return code;
}

}  // namespace reslab
