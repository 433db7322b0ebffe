#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <sstream>

#include "reslab/airy.hpp"
#include "reslab/cli.hpp"
#include "reslab/irrational.hpp"
#include "reslab/lattice.hpp"
#include "reslab/numtheory.hpp"
#include "reslab/parallel.hpp"
#include "reslab/picard.hpp"
#include "reslab/strichartz.hpp"

namespace py = pybind11;
using namespace reslab;

namespace {

// Hexadecimal keeps clear of the interpreter's cap on decimal conversions.
py::int_ to_py(const BigInt& x) {
    return py::reinterpret_steal<py::int_>(PyLong_FromString(x.get_str(16).c_str(), nullptr, 16));
}

py::int_ to_py(Count c) { return to_py(BigInt(c.to_string())); }

BigInt from_py(const py::int_& x) {
    const auto text = py::module_::import("builtins").attr("hex")(x).cast<std::string>();
    return BigInt(text, 0);
}

Freq anchor_from(const std::vector<std::int64_t>& k, int dim) {
    if (k.empty()) return Freq::from_vector(std::vector<std::int64_t>(static_cast<std::size_t>(dim), 0));
    return Freq::from_vector(k);
}

py::int_ count_gamma(int dim, std::int64_t n, const std::vector<std::int64_t>& k, const std::string& method) {
    const FrequencyBox box(dim, n);
    const Freq a = anchor_from(k, dim);
    if (static_cast<int>(a.dim) != dim) throw DomainError("anchor dimension does not match dim");
    py::gil_scoped_release release;
    ResonanceCount rc = [&] {
        switch (dim) {
            case 1: return count_gamma_prime_1d(box, a[0], parse_count_method(method.empty() ? "mitm" : method));
            case 2: return count_gamma_2d(box, a, parse_count_method(method.empty() ? "fast" : method));
            case 3: return count_gamma_dprime_3d(box, a, parse_count_method(method.empty() ? "mitm" : method));
        }
        throw DomainError("dim must be 1, 2 or 3");
    }();
    py::gil_scoped_acquire acquire;
    return to_py(rc.count);
}

py::dict strichartz_norm(int dim, std::int64_t n, std::int64_t m, const std::string& method) {
    const CountMethod cm = parse_count_method(method);
    NormReport r;
    {
        py::gil_scoped_release release;
        switch (dim) {
            case 1: r = l6_norm_1d(n, m, cm); break;
            case 2: r = l4_norm_2d(n, m, cm); break;
            case 3: r = l4_norm_3d(n, cm); break;
            default: throw DomainError("dim must be 1, 2 or 3");
        }
    }
    py::dict d;
    d["norm"] = to_string(r.kind);
    d["N"] = r.n;
    d["m"] = r.m;
    d["resonant_tuples"] = to_py(r.resonant_tuple_count);
    d["norm_powered"] = r.norm_powered;
    d["ratio_to_log"] = r.ratio_to_log;
    return d;
}

py::dict witness_dict(const ApproximationWitness& w) {
    py::dict d;
    d["gamma"] = w.gamma.to_string();
    d["N"] = w.n;
    d["p"] = to_py(w.p);
    d["q"] = to_py(w.q);
    d["convergent_index"] = w.convergent_index;
    d["multiplier"] = to_py(w.multiplier);
    d["defect_upper"] = w.defect_upper();
    return d;
}

py::dict airy_witness_dict(const AiryWitness& w) {
    py::list triples;
    for (const auto& t : w.triples) triples.append(py::make_tuple(to_py(t[0]), to_py(t[1]), to_py(t[2])));
    py::dict d;
    d["m"] = w.m;
    d["M"] = to_py(w.lcm);
    d["k"] = to_py(w.k);
    d["n"] = to_py(w.n);
    d["triples"] = triples;
    d["ordered_count"] = to_py(w.ordered_count);
    d["N_min"] = to_py(w.n_min);
    d["ratio_to_log"] = w.ratio_to_log;
    d["log_bound_holds"] = w.log_bound_holds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_reslab, m) {
    m.doc() = "Exact resonance counting and norm-inflation experiments";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<BudgetError>(m, "BudgetError", error.ptr());
    py::register_exception<PrecisionError>(m, "PrecisionError", error.ptr());
    py::register_exception<OverflowError>(m, "OverflowError", error.ptr());
    py::register_exception<WitnessNotFound>(m, "WitnessNotFound", domain.ptr());

    m.def("version", &artifact_version);
    m.def("set_thread_count", &set_thread_count, py::arg("n"));
    m.def("thread_count", &thread_count);

    m.def("count_gamma", &count_gamma, py::arg("dim"), py::arg("N"), py::arg("k") = std::vector<std::int64_t>{},
          py::arg("method") = "", "Resonant tuple count at anchor k in the box of radius N");
    m.def("strichartz_norm", &strichartz_norm, py::arg("dim"), py::arg("N"), py::arg("m") = 1,
          py::arg("method") = "fast");
    m.def(
        "totient_sum_ratio",
        [](std::uint64_t n) {
            const TotientSum s = totient_sum_ratio(n);
            py::dict d;
            d["N"] = s.limit;
            d["sum"] = s.sum;
            d["ratio"] = s.ratio;
            d["chain_holds"] = s.chain_holds;
            return d;
        },
        py::arg("N"));
    m.def("lcm_range", [](std::uint64_t k) { return to_py(lcm_range(k)); }, py::arg("m"));

    m.def(
        "picard_l2_norm",
        [](int dim, std::int64_t n, std::int64_t mm, double t) {
            py::gil_scoped_release release;
            return picard_l2_norm(WavePacketSpec{dim, mm, n}, t);
        },
        py::arg("dim"), py::arg("N"), py::arg("m"), py::arg("t"));
    m.def(
        "picard_coefficient",
        [](int dim, std::int64_t n, std::int64_t mm, double t, const std::vector<std::int64_t>& k) {
            const auto table = picard_coefficients(WavePacketSpec{dim, mm, n}, t);
            return table.at(Freq::from_vector(k)).value;
        },
        py::arg("dim"), py::arg("N"), py::arg("m"), py::arg("t"), py::arg("k"));

    m.def(
        "find_dc_witness",
        [](const std::string& gamma, std::int64_t n, std::size_t depth) {
            return witness_dict(find_dc_witness(GammaPreset::parse(gamma), n, depth));
        },
        py::arg("gamma"), py::arg("N"), py::arg("depth") = kDefaultWitnessDepth);
    m.def(
        "picard_split",
        [](const std::string& gamma, std::int64_t n, double t) {
            const SplitReport s = picard_split(GammaPreset::parse(gamma), n, t);
            py::dict d;
            d["witness"] = witness_dict(s.witness);
            d["max_resonant_phase"] = s.max_resonant_phase;
            d["min_nonresonant_phase"] = static_cast<double>(s.min_nonresonant_phase);
            d["l2_lower_bound"] = s.l2_lower_bound;
            d["ratio_to_t_log"] = s.ratio_to_t_log;
            return d;
        },
        py::arg("gamma"), py::arg("N"), py::arg("t"));

    m.def(
        "count_airy",
        [](const py::int_& n, const py::int_& k, std::int64_t radius, const std::string& method) {
            return to_py(count_airy({from_py(n), from_py(k), BigInt(static_cast<long>(radius))}, parse_airy_method(method)));
        },
        py::arg("n"), py::arg("k"), py::arg("N"), py::arg("method") = "divisor");
    m.def(
        "count_airy_restricted",
        [](const py::int_& n, const py::int_& k, std::int64_t radius, double gap) {
            return to_py(count_airy_restricted({from_py(n), from_py(k), BigInt(static_cast<long>(radius))}, gap));
        },
        py::arg("n"), py::arg("k"), py::arg("N"), py::arg("gap_factor") = 4.0);
    m.def(
        "build_airy_witness", [](std::uint64_t mm) { return airy_witness_dict(build_airy_witness(mm)); }, py::arg("m"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line in-process; returns (exit code, stdout, stderr)");
}
