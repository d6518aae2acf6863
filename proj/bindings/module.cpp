// Python bindings for the core operations. Buffers cross the boundary as
// (numpy float64 array, sample_rate) pairs.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqbench/channel.hpp"
#include "sqbench/experiment.hpp"
#include "sqbench/metrics.hpp"
#include "sqbench/noise.hpp"
#include "sqbench/stats.hpp"

namespace py = pybind11;
using namespace sqbench;

namespace {

AudioBuffer to_buffer(const py::array_t<double>& samples, int rate) {
  if (samples.ndim() != 1) throw Error("expected a 1-D sample array");
  AudioBuffer buf;
  buf.sample_rate = rate;
  buf.samples.assign(samples.data(), samples.data() + samples.size());
  return buf;
}

py::array_t<double> to_array(const AudioBuffer& buf) {
  py::array_t<double> out(static_cast<py::ssize_t>(buf.samples.size()));
  std::copy(buf.samples.begin(), buf.samples.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_sqbench, m) {
  m.doc() = "Speech-quality bias toolkit core";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<Error>(m, "SqbenchError");

  m.def("read_wav", [](const std::string& path) {
    const AudioBuffer buf = read_wav(path);
    return py::make_tuple(to_array(buf), buf.sample_rate);
  });
  m.def("write_wav",
        [](const py::array_t<double>& samples, int rate,
           const std::string& path) { write_wav(to_buffer(samples, rate), path); });
  m.def("resample", [](const py::array_t<double>& samples, int rate,
                       int target_rate) {
    return to_array(resample(to_buffer(samples, rate), target_rate));
  });
  m.def("normalize_to_dbfs",
        [](const py::array_t<double>& samples, int rate, double target_db) {
          return to_array(normalize_to_dbfs(to_buffer(samples, rate), target_db));
        });
  m.def("trim_silence", [](const py::array_t<double>& samples, int rate,
                           double threshold_db) {
    return to_array(trim_silence(to_buffer(samples, rate), threshold_db));
  }, py::arg("samples"), py::arg("rate"), py::arg("threshold_db") = -50.0);

  m.def("irs_filter", [](const py::array_t<double>& samples) {
    return to_array(irs_filter(to_buffer(samples, 8000)));
  });
  m.def("codec_pass", [](const py::array_t<double>& samples) {
    return to_array(codec_pass(to_buffer(samples, 8000)));
  });
  m.def("alaw_encode", &alaw_encode);
  m.def("alaw_decode", &alaw_decode);

  m.def("gen_noise",
        [](const std::string& kind, std::size_t length, int rate,
           std::uint64_t seed) {
          return to_array(gen_colored(noise_kind_from_string(kind), length,
                                      rate, seed));
        });
  m.def("mix_at_snr",
        [](const py::array_t<double>& clean, const py::array_t<double>& noise,
           int rate, double snr_db) {
          return to_array(mix_at_snr(to_buffer(clean, rate),
                                     to_buffer(noise, rate), snr_db));
        });

  m.def("degrade",
        [](const py::array_t<double>& reference, const std::string& noise_kind,
           double snr_db, bool codec, std::uint64_t seed) {
          const AudioBuffer ref = to_buffer(reference, 8000);
          const AudioBuffer noise = make_noise(
              noise_kind_from_string(noise_kind), ref.size(), {}, 6, seed);
          return to_array(degrade(ref, {noise_kind_from_string(noise_kind),
                                        snr_db, codec}, noise));
        },
        py::arg("reference"), py::arg("noise_kind"), py::arg("snr_db"),
        py::arg("codec") = true, py::arg("seed") = 0);

  m.def("nsim_score", [](const py::array_t<double>& ref,
                         const py::array_t<double>& deg) {
    return visqol_like_score(to_buffer(ref, 16000), to_buffer(deg, 16000)).value;
  });
  m.def("disturbance_score", [](const py::array_t<double>& ref,
                                const py::array_t<double>& deg) {
    return disturbance_score(to_buffer(ref, 8000), to_buffer(deg, 8000)).value;
  });

  m.def("ks_two_sample", [](const std::vector<double>& a,
                            const std::vector<double>& b) {
    const KsResult r = ks_two_sample(a, b);
    return py::make_tuple(r.statistic, r.p_value);
  });
  m.def("deviation_stats",
        [](const std::vector<std::pair<double, double>>& pairs) {
          const DeviationStats d = deviation_stats(pairs);
          return py::make_tuple(d.mad, d.rmsd, d.mean_diff);
        });
  m.def("polyfit_cubic", [](const std::vector<double>& x,
                            const std::vector<double>& y) {
    const CubicFit fit = polyfit_cubic(x, y);
    return py::make_tuple(
        std::vector<double>(fit.coeffs.begin(), fit.coeffs.end()),
        fit.residual_rms);
  });
}
