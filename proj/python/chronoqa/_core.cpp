#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "chronoqa/config.hpp"
#include "chronoqa/errors.hpp"
#include "chronoqa/harness.hpp"
#include "chronoqa/losses.hpp"
#include "chronoqa/metrics.hpp"
#include "chronoqa/temporal_text.hpp"
#include "commands.hpp"

namespace py = pybind11;
using namespace chronoqa;

namespace {

ExperimentConfig config_from(const std::string& json_text) {
    auto doc = nlohmann::json::parse(json_text.empty() ? "{}" : json_text, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("config is not valid JSON");
    apply_environment(doc);
    return config_from_json(doc);
}

py::tuple range_tuple(const TimeRange& r) {
    return py::make_tuple(r.start, r.end ? py::cast(*r.end) : py::none());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "chronoqa core bindings";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def("extract_years", [](const std::string& text) {
        std::vector<Year> out;
        for (const auto& y : extract_years(text)) out.push_back(y.value);
        return out;
    });
    m.def("parse_range", [](const std::string& text) -> py::object {
        const auto r = parse_range(text);
        return r ? py::object(range_tuple(*r)) : py::none();
    }, "(start, end) with end None for open ranges, or None");

    m.def("normalize_answer", &normalize_answer);
    m.def("exact_match", &exact_match, py::arg("prediction"), py::arg("gold"));
    m.def("token_f1", &token_f1, py::arg("prediction"), py::arg("gold"));

    m.def("triplet_margin_loss",
          [](const std::vector<double>& s, const std::vector<double>& pos, const std::vector<double>& neg,
             double margin, double p) {
              LossConfig cfg;
              cfg.margin = margin;
              cfg.norm_p = p;
              return triplet_margin_loss(s, pos, neg, cfg);
          },
          py::arg("anchor"), py::arg("positive"), py::arg("negative"), py::arg("margin") = 1.0, py::arg("p") = 2.0);
    m.def("cross_entropy", [](const std::vector<double>& logits, std::size_t target) {
        return cross_entropy(logits, target);
    });
    m.def("combined_loss",
          [](double lp, double ls, double lt, double alpha, double beta, double gamma) {
              LossConfig cfg;
              cfg.alpha = alpha;
              cfg.beta = beta;
              cfg.gamma = gamma;
              return combined_loss(lp, ls, lt, cfg);
          },
          py::arg("l_predict"), py::arg("l_similar"), py::arg("l_triple"), py::arg("alpha") = 1.0,
          py::arg("beta") = 0.5, py::arg("gamma") = 0.5);
    m.def("forgetting", &forgetting);

    m.def("default_config", [] { return config_to_json(ExperimentConfig{}).dump(); });
    m.def("normalize_config", [](const std::string& json_text) { return config_to_json(config_from(json_text)).dump(); });
    m.def("config_hash", [](const std::string& json_text) { return config_hash(config_from(json_text)); });

    m.def("build", [](const std::string& config_json, const std::filesystem::path& out) {
        std::ostringstream log;
        cli::cmd_build(config_from(config_json), out, log);
        return log.str();
    });
    m.def("train",
          [](const std::string& config_json, const std::filesystem::path& data, const std::filesystem::path& runs,
             bool resume, int stop_after_stage) {
              cli::TrainOptions opts;
              opts.resume = resume;
              if (stop_after_stage > 0) opts.stop_after_stage = stop_after_stage;
              std::ostringstream log;
              py::gil_scoped_release release;
              return cli::cmd_train(config_from(config_json), data, runs, opts, log);
          },
          py::arg("config_json"), py::arg("data"), py::arg("runs"), py::arg("resume") = false,
          py::arg("stop_after_stage") = 0, "returns the run directory");
    m.def("evaluate",
          [](const std::string& config_json, const std::filesystem::path& checkpoint,
             const std::filesystem::path& data, const std::string& split) {
              const auto s = parse_split(split);
              if (!s) throw UsageError("unknown split '" + split + "'");
              std::ostringstream out;
              const auto rows = cli::cmd_eval(checkpoint, data, config_from(config_json), {*s}, {}, std::nullopt, out);
              py::list result;
              for (const auto& r : rows) {
                  py::dict d;
                  d["stage"] = r.stage;
                  d["subset"] = r.subset;
                  d["split"] = std::string(to_string(r.split));
                  d["n"] = r.n;
                  d["em"] = r.em;
                  d["f1"] = r.f1;
                  result.append(d);
              }
              return result;
          });
    m.def("report", [](const std::vector<std::filesystem::path>& runs, const std::string& split) {
        const auto s = parse_split(split);
        if (!s) throw UsageError("unknown split '" + split + "'");
        return cli::cmd_report(runs, *s);
    }, py::arg("runs"), py::arg("split") = "test");
    m.def("gradcheck",
          [](std::uint64_t seed, int instances, bool inject_sign_flip) {
              oracle::GradcheckOptions o;
              o.seed = seed;
              o.instances = instances;
              o.inject_sign_flip = inject_sign_flip;
              const auto r = oracle::run_gradcheck(o);
              return py::make_tuple(r.passed, r.max_relative_error);
          },
          py::arg("seed") = 1, py::arg("instances") = 100, py::arg("inject_sign_flip") = false,
          "(passed, max relative error)");
}
