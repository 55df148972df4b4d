#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "pdqp/classical.hpp"
#include "pdqp/demos.hpp"
#include "pdqp/harness.hpp"
#include "pdqp/protocol.hpp"

namespace py = pybind11;

namespace {

pdqp::Rng rng_from_seed(std::uint64_t seed) { return pdqp::make_rng(seed); }

py::object json_to_py(const pdqp::json& value) {
    switch (value.type()) {
        case nlohmann::detail::value_t::null: return py::none();
        case nlohmann::detail::value_t::boolean: return py::bool_(value.get<bool>());
        case nlohmann::detail::value_t::number_integer:
            return py::int_(value.get<std::int64_t>());
        case nlohmann::detail::value_t::number_unsigned:
            return py::int_(value.get<std::uint64_t>());
        case nlohmann::detail::value_t::number_float:
            return py::float_(value.get<double>());
        case nlohmann::detail::value_t::string: return py::str(value.get<std::string>());
        case nlohmann::detail::value_t::array: {
            py::list list;
            for (const auto& item : value) list.append(json_to_py(item));
            return list;
        }
        case nlohmann::detail::value_t::object: {
            py::dict dict;
            for (const auto& [key, item] : value.items()) {
                dict[py::str(key)] = json_to_py(item);
            }
            return dict;
        }
        default: return py::none();
    }
}

py::dict transcript_to_py(const pdqp::ProtocolTranscript& t, bool timeout) {
    py::dict out;
    out["mode"] = t.mode == pdqp::ProtocolMode::quantum ? "quantum" : "classical";
    out["n"] = t.n;
    out["q"] = t.q;
    out["x"] = pdqp::bits_to_string(t.input);
    out["branch"] = t.branch == pdqp::ProtocolBranch::zero_ray ? "zero-ray" : "generic";
    out["ray"] = t.ray_outcome;
    out["samples_used"] = t.samples_used;
    out["coupons"] = t.coupons;
    if (timeout) {
        out["answer"] = py::none();
    } else {
        out["answer"] = t.answer;
    }
    out["timeout"] = timeout;
    return out;
}

py::dict run_protocol_py(const pdqp::BooleanFunction& f, const std::string& x,
                         std::uint64_t seed, py::object sample_cap, const std::string& mode) {
    const auto bits = pdqp::bits_from_string(x);
    pdqp::Rng rng = rng_from_seed(seed);
    const std::uint32_t q = pdqp::select_prime(f.arity());
    const std::uint64_t cap =
        sample_cap.is_none() ? pdqp::default_sample_cap(q) : sample_cap.cast<std::uint64_t>();
    try {
        if (mode == "classical") {
            const auto advice = pdqp::build_rand_advice(f);
            return transcript_to_py(pdqp::run_pdpp(advice, bits, rng, cap), false);
        }
        std::uint64_t support = 1;
        bool fits = true;
        for (int i = 0; i < f.arity() && fits; ++i) {
            support *= q;
            fits = support <= pdqp::AdviceState::kMaxMaterializedSupport;
        }
        const auto advice = pdqp::AdviceState::build(
            f, fits ? pdqp::AdviceForm::materialized : pdqp::AdviceForm::analytic);
        return transcript_to_py(pdqp::run_protocol(advice, bits, rng, cap), false);
    } catch (const pdqp::CouponTimeout& timeout) {
        return transcript_to_py(timeout.partial(), true);
    }
}

py::dict find_collision_py(std::uint32_t domain, std::uint64_t seed, std::uint64_t sample_cap,
                           const std::string& kind) {
    pdqp::Rng rng = rng_from_seed(seed);
    pdqp::Rng setup = pdqp::make_rng(seed, 0);
    const auto f = kind == "random" ? pdqp::TwoToOneFunction::random_pairing(domain, setup)
                                    : pdqp::TwoToOneFunction::floor_half(domain);
    const auto result = pdqp::find_collision(f, rng, sample_cap);
    py::dict out;
    out["first"] = result.first;
    out["second"] = result.second;
    out["image"] = f(result.first);
    out["samples_used"] = result.samples_used;
    return out;
}

py::dict grover_py(std::uint64_t domain, std::uint64_t marked, std::uint64_t seed) {
    const int n = [&] {
        if (domain < 2 || !std::has_single_bit(domain)) {
            throw std::invalid_argument("N must be a power of 2 and >= 2");
        }
        return std::countr_zero(domain);
    }();
    std::vector<std::uint8_t> table(domain, 0);
    if (marked >= domain) throw std::invalid_argument("marked item out of range");
    table[marked] = 1;
    pdqp::Rng rng = rng_from_seed(seed);
    const auto result = pdqp::grover_noncollapsing(pdqp::BooleanFunction(n, table), rng);
    py::dict out;
    out["found"] = result.found;
    out["iterations"] = result.iterations;
    out["sample_budget"] = result.sample_budget;
    out["samples_used"] = result.samples_used;
    out["marked_probability"] = result.marked_probability;
    return out;
}

py::dict index_py(const std::string& alice_bits, std::uint64_t bob_index, std::uint64_t seed,
                  py::object sample_cap) {
    pdqp::IndexInstance instance;
    instance.alice_bits = pdqp::bits_from_string(alice_bits);
    instance.bob_index = bob_index;
    const int n = std::countr_zero(instance.alice_bits.size());
    const std::uint64_t cap = sample_cap.is_none()
                                  ? pdqp::default_sample_cap(pdqp::select_prime(n))
                                  : sample_cap.cast<std::uint64_t>();
    pdqp::Rng rng = rng_from_seed(seed);
    const auto result = pdqp::index_protocol(instance, rng, cap);
    py::dict out;
    out["bit"] = result.bit;
    out["message_qubits"] = result.message_qubits;
    out["samples_used"] = result.transcript.samples_used;
    return out;
}

py::dict pdqexp_py(const pdqp::BooleanFunction& f, const std::string& x, std::uint64_t seed,
                   std::uint64_t try_cap) {
    pdqp::Rng rng = rng_from_seed(seed);
    const auto advice = pdqp::build_uniform_function_state(f);
    const auto result = pdqp::pdqexp_eval(advice, pdqp::bits_from_string(x), rng, try_cap);
    py::dict out;
    out["answer"] = result.answer;
    out["preparations"] = result.preparations;
    return out;
}

std::uint32_t mle_eval_py(const pdqp::BooleanFunction& f, std::uint32_t q,
                          const std::vector<std::uint32_t>& point) {
    const pdqp::PrimeField field(q);
    const pdqp::MultilinearExtension g(f, field);
    return g.eval(pdqp::make_vector(point, field)).value();
}

std::vector<std::uint32_t> ray_canonical_py(std::uint32_t q,
                                            const std::vector<std::uint32_t>& v) {
    const pdqp::PrimeField field(q);
    return pdqp::raw_values(pdqp::ray_canonical(pdqp::make_vector(v, field)));
}

std::uint32_t interpolate_py(std::uint32_t q,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>& points,
                             int degree_bound) {
    const pdqp::PrimeField field(q);
    std::vector<pdqp::LineSamplePoint> line_points;
    line_points.reserve(points.size());
    for (const auto& [j, value] : points) {
        line_points.push_back({pdqp::FieldElement(j, field), pdqp::FieldElement(value, field)});
    }
    return pdqp::interpolate_at_zero(line_points, degree_bound).value();
}

py::dict run_experiment_py(const std::string& kind, py::kwargs kwargs) {
    pdqp::ExperimentConfig config;
    config.kind = pdqp::experiment_kind_from_name(kind);
    if (kwargs.contains("n")) config.n = kwargs["n"].cast<int>();
    if (kwargs.contains("N")) config.domain = kwargs["N"].cast<std::uint64_t>();
    if (kwargs.contains("fn")) config.fn_spec = kwargs["fn"].cast<std::string>();
    if (kwargs.contains("trials")) config.trials = kwargs["trials"].cast<std::uint64_t>();
    if (kwargs.contains("seed")) config.seed = kwargs["seed"].cast<std::uint64_t>();
    if (kwargs.contains("sample_cap")) {
        config.sample_cap = kwargs["sample_cap"].cast<std::uint64_t>();
    }
    if (kwargs.contains("mode")) {
        config.mode = kwargs["mode"].cast<std::string>() == "classical"
                          ? pdqp::ProtocolMode::classical
                          : pdqp::ProtocolMode::quantum;
    }
    if (kwargs.contains("two_to_one")) {
        config.two_to_one = kwargs["two_to_one"].cast<std::string>();
    }
    if (kwargs.contains("variant")) config.warmup = kwargs["variant"].cast<std::string>();
    if (kwargs.contains("x")) {
        config.fixed_input = pdqp::bits_from_string(kwargs["x"].cast<std::string>());
    }
    const auto result = pdqp::run_experiment(config);
    py::dict out;
    out["summary"] = json_to_py(result.summary);
    py::list records;
    for (const auto& line : result.records) records.append(json_to_py(pdqp::json::parse(line)));
    out["records"] = records;
    out["correctness_ok"] = result.correctness_ok;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact simulator for quantum computation with non-collapsing measurements "
              "and quantum advice";
    m.attr("__version__") = "0.1.0";

    py::class_<pdqp::BooleanFunction>(m, "BooleanFunction")
        .def(py::init([](int n, const std::string& spec) {
                 return pdqp::BooleanFunction::parse_spec(n, spec);
             }),
             py::arg("n"), py::arg("spec"),
             "Build from a hex table literal or a named function "
             "(and, xor, const0, const1)")
        .def_static(
            "random",
            [](int n, std::uint64_t seed) {
                pdqp::Rng rng = pdqp::make_rng(seed);
                return pdqp::BooleanFunction::random(n, rng);
            },
            py::arg("n"), py::arg("seed"))
        .def_property_readonly("arity", &pdqp::BooleanFunction::arity)
        .def("to_hex", &pdqp::BooleanFunction::to_hex)
        .def("__call__",
             [](const pdqp::BooleanFunction& f, const std::string& x) {
                 return f(pdqp::bits_from_string(x)) ? 1 : 0;
             })
        .def("__repr__", [](const pdqp::BooleanFunction& f) {
            return "BooleanFunction(n=" + std::to_string(f.arity()) + ", table=0x" + f.to_hex() +
                   ")";
        });

    m.def("select_prime", &pdqp::select_prime, py::arg("n"),
          "Smallest prime q with q >= n + 2");
    m.def("advice_qubit_cost", &pdqp::advice_qubit_cost, py::arg("n"));
    m.def("default_sample_cap", &pdqp::default_sample_cap, py::arg("q"));
    m.def("expected_coupon_samples", &pdqp::expected_coupon_samples, py::arg("q"),
          "(q-1) * H_{q-1}: expected samples to collect every line value");
    m.def("grover_marked_probability", &pdqp::grover_marked_probability, py::arg("N"));

    m.def("mle_eval", &mle_eval_py, py::arg("f"), py::arg("q"), py::arg("point"),
          "Evaluate the multilinear extension of f over F_q");
    m.def("ray_canonical", &ray_canonical_py, py::arg("q"), py::arg("v"));
    m.def("interpolate_at_zero", &interpolate_py, py::arg("q"), py::arg("points"),
          py::arg("degree_bound"));

    m.def("run_protocol", &run_protocol_py, py::arg("f"), py::arg("x"), py::arg("seed") = 0,
          py::arg("sample_cap") = py::none(), py::arg("mode") = "quantum",
          "One full protocol run; returns the transcript as a dict");
    m.def("find_collision", &find_collision_py, py::arg("N"), py::arg("seed") = 0,
          py::arg("sample_cap") = 64, py::arg("kind") = "floorhalf");
    m.def("grover_search", &grover_py, py::arg("N"), py::arg("marked"), py::arg("seed") = 0);
    m.def("index_query", &index_py, py::arg("x"), py::arg("i"), py::arg("seed") = 0,
          py::arg("sample_cap") = py::none(),
          "Recover bit i (1-based) of x through the communication protocol");
    m.def("pdqexp_eval", &pdqexp_py, py::arg("f"), py::arg("x"), py::arg("seed") = 0,
          py::arg("try_cap") = 1 << 20);
    m.def("run_experiment", &run_experiment_py, py::arg("kind"),
          "Batch driver; kwargs mirror the CLI flags");
}
