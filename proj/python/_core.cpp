// Copyright 2026 The printproof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "printproof/codec.hpp"
#include "printproof/error.hpp"
#include "printproof/filters.hpp"
#include "printproof/metadata.hpp"
#include "printproof/metrology.hpp"
#include "printproof/report.hpp"

namespace py = pybind11;
using namespace printproof;
using nlohmann::json;

namespace {

ByteView view(const py::bytes& b) {
    char* data = nullptr;
    py::ssize_t size = 0;
    PyBytes_AsStringAndSize(b.ptr(), &data, &size);
    return {reinterpret_cast<const std::uint8_t*>(data), static_cast<std::size_t>(size)};
}

py::bytes to_py(const Bytes& b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

py::object to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::object& o) {
    if (py::isinstance<py::str>(o)) return json::parse(o.cast<std::string>());
    if (py::isinstance<py::bytes>(o)) return json::parse(o.cast<std::string>());
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

metrology::AnnotationSet checked_annotations(const json& j, const RasterImage& img) {
    metrology::AnnotationSet ann = metrology::annotations_from_json(j);
    if (ann.image_hash != img.source_hash()) {
        throw Error(ErrorCode::HashMismatch, "annotations reference image " + ann.image_hash.hex() +
                                                 ", input is " + img.source_hash().hex());
    }
    const auto problems = metrology::check_annotations(ann, img.width(), img.height());
    if (!problems.empty()) {
        throw Error(ErrorCode::InvalidAnnotations,
                    problems.front().field + ": " + problems.front().message);
    }
    return ann;
}

py::array_t<float> map_values(const AnalysisMap& m) {
    py::array_t<float> arr({static_cast<py::ssize_t>(m.height), static_cast<py::ssize_t>(m.width),
                            static_cast<py::ssize_t>(m.channels)});
    std::copy(m.values.begin(), m.values.end(), arr.mutable_data());
    return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "printproof native core";

    static py::exception<Error> error_type(m, "PrintproofError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const filters::InvalidParam& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(std::string(e.what()));
            exc.attr("code") = std::string(error_code_name(e.code()));
            exc.attr("field") = e.field();
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(std::string(e.what()));
            exc.attr("code") = std::string(error_code_name(e.code()));
            exc.attr("field") = py::none();
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<AnalysisMap>(m, "AnalysisMap")
        .def_readonly("width", &AnalysisMap::width)
        .def_readonly("height", &AnalysisMap::height)
        .def_readonly("channels", &AnalysisMap::channels)
        .def_property_readonly("kind", [](const AnalysisMap& a) { return std::string(to_string(a.kind)); })
        .def_property_readonly("params", [](const AnalysisMap& a) { return to_py(json::parse(a.params_json)); })
        .def_property_readonly("params_digest", [](const AnalysisMap& a) { return a.params_digest.hex(); })
        .def_property_readonly("values", &map_values, "float32 array of shape (height, width, channels)")
        .def("to_png", [](const AnalysisMap& a) { return to_py(encode_map_png(a)); },
             "Deterministic PNG with the parameters in a text chunk");

    m.def("content_hash", [](const py::bytes& data) { return compute_hash(view(data)).hex(); },
          py::arg("data"), "SHA-256 of the bytes as lowercase hex");

    m.def("metadata", [](const py::bytes& data) { return to_py(metadata::to_json(metadata::summarize(view(data)))); },
          py::arg("data"), "Metadata summary of a JPEG or PNG as a dict");
    m.def("metadata_listing",
          [](const py::bytes& data) { return metadata::format_listing(metadata::summarize(view(data))); },
          py::arg("data"), "Metadata summary as aligned 'Label : value' lines");

    m.def("ela",
          [](const py::bytes& data, int quality, int scale, int contrast) {
              return filters::ela_map(load_image(view(data)), {quality, scale, contrast});
          },
          py::arg("data"), py::arg("quality") = 75, py::arg("scale") = 50, py::arg("contrast") = 20);
    m.def("pca",
          [](const py::bytes& data, int component, const std::string& mode) {
              const RasterImage img = load_image(view(data));
              return filters::pca_map(img, filters::pca_basis(img), component,
                                      filters::pca_mode_from_string(mode));
          },
          py::arg("data"), py::arg("component") = 1, py::arg("mode") = "projection");
    m.def("lga",
          [](const py::bytes& data, int intensity, const std::string& channel, bool normalized) {
              return filters::lga_map(load_image(view(data)),
                                      {intensity, channel_from_string(channel), normalized});
          },
          py::arg("data"), py::arg("intensity") = 95, py::arg("channel") = "blue",
          py::arg("normalized") = true);
    m.def("noise",
          [](const py::bytes& data, int radius, double gain) {
              return filters::noise_map(load_image(view(data)), {radius, gain});
          },
          py::arg("data"), py::arg("radius") = 1, py::arg("gain") = 8.0);

    m.def("metrology",
          [](const py::bytes& data, const py::object& annotations, std::uint64_t seed) {
              const RasterImage img = load_image(view(data));
              const auto ann = checked_annotations(from_py(annotations), img);
              return to_py(metrology::run_metrology(ann, img.width(), img.height(), seed));
          },
          py::arg("data"), py::arg("annotations"), py::arg("seed") = 0,
          "Vanishing points, horizon, heights, tilt and distortion for an annotation set");

    m.def("report",
          [](const py::bytes& data, const std::string& out_dir, const py::object& annotations,
             std::uint64_t seed, std::optional<std::string> fixed_time, bool html) {
              const ByteView bytes = view(data);
              const RasterImage img = load_image(bytes);
              std::optional<report::MetrologyInput> metro;
              if (!annotations.is_none()) {
                  const json j = from_py(annotations);
                  const auto ann = checked_annotations(j, img);
                  const std::string raw = py::isinstance<py::str>(annotations) || py::isinstance<py::bytes>(annotations)
                                              ? annotations.cast<std::string>()
                                              : report::canonical_dump(j);
                  metro = report::MetrologyInput{Bytes(raw.begin(), raw.end()),
                                                 metrology::run_metrology(ann, img.width(), img.height(), seed),
                                                 seed};
              }
              report::ReportOptions opts;
              opts.fixed_time = std::move(fixed_time);
              opts.html = html;
              const auto r = report::build_report(img, metadata::summarize(bytes), report::default_analyses(img),
                                                  metro, {}, opts);
              report::write_report_directory(r, out_dir);
              return to_py(r.document);
          },
          py::arg("data"), py::arg("out_dir"), py::arg("annotations") = py::none(), py::arg("seed") = 0,
          py::arg("fixed_time") = py::none(), py::arg("html") = false,
          "Writes an audited report directory and returns report.json as a dict");

    m.def("verify",
          [](const std::string& dir) {
              const auto v = report::verify_report_directory(dir);
              py::dict d;
              d["ok"] = v.ok;
              d["problems"] = v.problems;
              d["entries_checked"] = v.entries_checked;
              d["files_checked"] = v.files_checked;
              return d;
          },
          py::arg("report_dir"), "Recomputes every hash in a report directory");
}
