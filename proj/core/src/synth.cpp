#include "survscore/synth.hpp"

#include <cmath>
#include <sstream>

#include "survscore/csv.hpp"
#include "survscore/errors.hpp"
#include "survscore/rng.hpp"

namespace survscore {

SurvivalDataset generate_synthetic(const SynthSpec& spec) {
  if (spec.n == 0) throw ValidationError("synth: n must be positive");
  if (spec.baseline_rate <= 0 || spec.weibull_shape <= 0)
    throw ValidationError("synth: baseline_rate and weibull_shape must be positive");
  if (spec.censor_rate < 0) throw ValidationError("synth: censor_rate must be nonnegative");

  SurvivalDataset ds;
  ds.time_col = "time";
  ds.status_col = "status";
  ds.times.resize(spec.n);
  ds.status.resize(spec.n);

  auto add_continuous = [&](const std::string& name) {
    Column col;
    col.name = name;
    col.kind = ColumnKind::continuous;
    col.numeric.resize(spec.n);
    ds.columns.push_back(std::move(col));
  };
  for (std::size_t i = 0; i < spec.normal_coefs.size(); ++i)
    add_continuous("x" + std::to_string(i + 1));
  for (std::size_t i = 0; i < spec.binary_coefs.size(); ++i)
    add_continuous("z" + std::to_string(i + 1));
  for (std::size_t i = 0; i < spec.n_noise_normal; ++i)
    add_continuous("n" + std::to_string(i + 1));
  for (std::size_t i = 0; i < spec.n_noise_categorical; ++i) {
    Column col;
    col.name = "c" + std::to_string(i + 1);
    col.kind = ColumnKind::categorical;
    col.labels = {"a", "b", "c"};
    col.codes.resize(spec.n);
    ds.columns.push_back(std::move(col));
  }
  // Pointers are only taken after every column has been added.
  std::vector<Column*> normals, binaries, noise_normals, noise_cats;
  {
    std::size_t c = 0;
    for (std::size_t i = 0; i < spec.normal_coefs.size(); ++i) normals.push_back(&ds.columns[c++]);
    for (std::size_t i = 0; i < spec.binary_coefs.size(); ++i) binaries.push_back(&ds.columns[c++]);
    for (std::size_t i = 0; i < spec.n_noise_normal; ++i) noise_normals.push_back(&ds.columns[c++]);
    for (std::size_t i = 0; i < spec.n_noise_categorical; ++i) noise_cats.push_back(&ds.columns[c++]);
  }

  Rng rng(derive_seed(spec.seed, {rng_stream::synth}));
  for (std::size_t i = 0; i < spec.n; ++i) {
    double lp = 0.0;
    for (std::size_t v = 0; v < normals.size(); ++v) {
      const double x = rng.next_normal();
      normals[v]->numeric[i] = x;
      lp += spec.normal_coefs[v] * x;
    }
    for (std::size_t v = 0; v < binaries.size(); ++v) {
      const double z = rng.next_bernoulli(0.5) ? 1.0 : 0.0;
      binaries[v]->numeric[i] = z;
      lp += spec.binary_coefs[v] * z;
    }
    for (auto* col : noise_normals) col->numeric[i] = rng.next_normal();
    for (auto* col : noise_cats)
      col->codes[i] = static_cast<std::int32_t>(rng.next_below(3));

    // S(t|x) = exp(-(rate*t)^shape * e^lp), inverted at a unit exponential.
    const double e = rng.next_exponential(1.0);
    const double event_time =
        std::pow(e * std::exp(-lp), 1.0 / spec.weibull_shape) / spec.baseline_rate;
    if (spec.censor_rate > 0) {
      const double censor_time = rng.next_exponential(spec.censor_rate);
      ds.times[i] = std::min(event_time, censor_time);
      ds.status[i] = event_time <= censor_time ? 1 : 0;
    } else {
      ds.times[i] = event_time;
      ds.status[i] = 1;
    }
  }
  ds.validate();
  return ds;
}

std::string synth_truth_json(const SynthSpec& spec) {
  std::ostringstream out;
  out << "{\"n\":" << spec.n << ",\"seed\":" << spec.seed
      << ",\"baseline_rate\":" << format_double(spec.baseline_rate)
      << ",\"weibull_shape\":" << format_double(spec.weibull_shape)
      << ",\"censor_rate\":" << format_double(spec.censor_rate) << ",\"coefficients\":{";
  bool first = true;
  for (std::size_t i = 0; i < spec.normal_coefs.size(); ++i) {
    if (!first) out << ",";
    out << "\"x" << (i + 1) << "\":" << format_double(spec.normal_coefs[i]);
    first = false;
  }
  for (std::size_t i = 0; i < spec.binary_coefs.size(); ++i) {
    if (!first) out << ",";
    out << "\"z" << (i + 1) << "\":" << format_double(spec.binary_coefs[i]);
    first = false;
  }
  out << "}}";
  return out.str();
}

} // namespace survscore
