// Copyright 2026 The ptxlat Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptxlat/analysis.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ptxlat/error.hpp"

namespace ptxlat::analysis {

namespace {

Cycles after_overhead(const Cycles& delta, std::int64_t overhead) { return delta - Cycles(overhead); }

// Throughput figures are kept to 1e-6 GB/s so that a replayed value equals
// the figure it was derived from.
double round_micro(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace

double operand_bytes(const TensorCoreOp& op) {
  const double m = op.shape.m, n = op.shape.n, k = op.shape.k;
  const double in_bits = bit_width(op.in_type);
  const double acc_bits = bit_width(op.acc_type);
  return ((m * k + k * n) * in_bits + m * n * acc_bits) / 8.0;
}

std::map<TypePair, double> default_theoretical_throughput() {
  std::map<TypePair, double> out;
  const auto seed = seed_paper_table();
  for (const auto& op : seed.tensor_ops()) {
    if (op.theoretical_throughput) out[{op.in_type, op.acc_type}] = *op.theoretical_throughput;
  }
  return out;
}

void AnalysisConfig::validate() const {
  if (clock_overhead < 0) throw ConfigError(fmt::format("clock_overhead must be >= 0, got {}", clock_overhead));
  if (shared_followup_cycles < 0) {
    throw ConfigError(fmt::format("shared_followup_cycles must be >= 0, got {}", shared_followup_cycles));
  }
  if (!(clock_rate_hz > 0) || !std::isfinite(clock_rate_hz)) {
    throw ConfigError(fmt::format("clock_rate_hz must be positive, got {}", clock_rate_hz));
  }
  if (!work_metric) throw ConfigError("no work metric configured");
}

Cycles compute_cpi(const LatencyMeasurement& m, std::vector<std::string>* notes) {
  if (m.instruction_count == 0) throw ValidationError("compute_cpi: instruction count is 0");
  if (m.end_clock < m.start_clock) {
    throw ValidationError(fmt::format("compute_cpi: end clock {} precedes start clock {}", m.end_clock, m.start_clock));
  }
  const auto delta = static_cast<std::int64_t>(m.end_clock - m.start_clock);
  const auto overhead = static_cast<std::int64_t>(m.clock_overhead);
  if (delta < overhead) {
    if (notes) notes->push_back(fmt::format("delta {} is below the clock overhead {}; CPI clamped to 0", delta, overhead));
    return Cycles(0);
  }
  return Cycles(delta - overhead, m.instruction_count);
}

LaunchCurve launch_overhead_curve(const std::map<std::uint32_t, LatencyMeasurement>& measurements) {
  LaunchCurve curve;
  for (const auto& [n, m] : measurements) {
    auto adjusted = m;
    adjusted.instruction_count = n;
    curve.per_n[n] = compute_cpi(adjusted, &curve.notes);
  }
  if (curve.per_n.empty()) return curve;
  for (auto it = curve.per_n.begin(); std::next(it) != curve.per_n.end(); ++it) {
    auto next = std::next(it);
    if (next->first == it->first + 1 && next->second == it->second) {
      curve.steady_from = it->first;
      curve.steady = it->second;
      return curve;
    }
  }
  curve.steady = curve.per_n.rbegin()->second;
  curve.notes.push_back(fmt::format("CPI never stabilizes over N={}..{}; using the last value",
                                    curve.per_n.begin()->first, curve.per_n.rbegin()->first));
  return curve;
}

Cycles memory_latency(const Cycles& total_delta, std::uint64_t loads, const AnalysisConfig& cfg) {
  if (loads == 0) throw ValidationError("memory_latency: load count is 0");
  return after_overhead(total_delta, cfg.clock_overhead) / Cycles(static_cast<std::int64_t>(loads));
}

Cycles shared_latency(const Cycles& total_delta, const AnalysisConfig& cfg, std::vector<std::string>* notes) {
  auto v = after_overhead(total_delta, cfg.clock_overhead) - Cycles(cfg.shared_followup_cycles);
  if (v < 0) {
    if (notes) {
      notes->push_back(fmt::format("delta {} is below overhead {} plus follow-up {}; latency clamped to 0",
                                   format_cycles(total_delta), cfg.clock_overhead, cfg.shared_followup_cycles));
    }
    return Cycles(0);
  }
  return v;
}

Cycles tc_latency(const Cycles& total_delta, std::uint64_t iters, const AnalysisConfig& cfg) {
  if (iters == 0) throw ValidationError("tc_latency: iteration count is 0");
  return after_overhead(total_delta, cfg.clock_overhead) / Cycles(4 * static_cast<std::int64_t>(iters));
}

Throughput tc_throughput(const TensorCoreOp& op, const Cycles& elapsed_cycles, std::uint64_t op_count,
                         const AnalysisConfig& cfg) {
  if (elapsed_cycles <= 0) throw ValidationError("tc_throughput: elapsed cycles must be positive");
  cfg.validate();
  Throughput t;
  const double seconds = boost::rational_cast<double>(elapsed_cycles) / cfg.clock_rate_hz;
  t.measured = cfg.work_metric(op) * static_cast<double>(op_count) / seconds / 1e9;
  if (auto it = cfg.theoretical_throughput.find({op.in_type, op.acc_type}); it != cfg.theoretical_throughput.end()) {
    t.theoretical = it->second;
    if (it->second > 0) t.ratio = t.measured / it->second;
  }
  return t;
}

Cycles throughput_elapsed_cycles(const TensorCoreOp& op, std::uint64_t op_count, double gbps,
                                 const AnalysisConfig& cfg) {
  if (!(gbps > 0)) throw ValidationError(fmt::format("throughput must be positive, got {}", gbps));
  cfg.validate();
  // Work and rates are integral for every built-in op; scale so that the
  // rational is exact when they are.
  const double numerator = cfg.work_metric(op) * static_cast<double>(op_count) * cfg.clock_rate_hz;
  constexpr std::int64_t kScale = 1000;
  const double denominator = gbps * 1e9;
  if (numerator / 1e3 > 9e18 || denominator / 1e3 > 9e18) {
    throw ValidationError("throughput_elapsed_cycles: value out of range");
  }
  const auto num = static_cast<std::int64_t>(std::llround(numerator / 1e6 * kScale));
  const auto den = static_cast<std::int64_t>(std::llround(denominator / 1e6 * kScale));
  if (den == 0 || num == 0) throw ValidationError("throughput_elapsed_cycles: value out of range");
  return Cycles(num, den);
}

AnalyzedBenchmark analyze_measurement(const codegen::BenchInfo& bench, std::uint64_t start_clock,
                                      std::uint64_t end_clock, const AnalysisConfig& cfg,
                                      std::optional<Cycles> throughput_cycles) {
  using codegen::BenchKind;
  cfg.validate();
  if (end_clock < start_clock) {
    throw ValidationError(fmt::format("{}: end clock {} precedes start clock {}", bench.id, end_clock, start_clock));
  }
  AnalyzedBenchmark out;
  out.bench = bench;
  const Cycles delta(static_cast<std::int64_t>(end_clock - start_clock));
  switch (bench.kind) {
    case BenchKind::clock_overhead:
      out.value = delta;
      break;
    case BenchKind::alu: {
      LatencyMeasurement m{start_clock, end_clock, static_cast<std::uint32_t>(bench.divisor),
                           static_cast<std::uint64_t>(cfg.clock_overhead)};
      out.value = compute_cpi(m, &out.notes);
      break;
    }
    case BenchKind::memory:
      out.value = memory_latency(delta, bench.divisor, cfg);
      break;
    case BenchKind::shared: {
      auto c = cfg;
      if (!bench.subtract_followup) c.shared_followup_cycles = 0;
      out.value = shared_latency(delta, c, &out.notes);
      break;
    }
    case BenchKind::wmma: {
      out.value = tc_latency(delta, bench.iters, cfg);
      if (throughput_cycles) {
        if (const auto* op = bench.tensor_op()) out.throughput = tc_throughput(*op, *throughput_cycles, bench.timed_count, cfg);
      }
      break;
    }
  }
  if (out.value < 0) {
    out.notes.push_back(fmt::format("negative result {} clamped to 0", format_cycles(out.value)));
    out.value = 0;
  }
  return out;
}

namespace {

void widen(LatencyRecord& r, const Cycles& v, const std::string& bench_id) {
  if (v >= r.cycles_min && v <= r.cycles_max) return;
  r.cycles_min = std::min(r.cycles_min, v);
  r.cycles_max = std::max(r.cycles_max, v);
  r.note = fmt::format("repeat measurements disagree (latest from {}); kept as range", bench_id);
}

void add_instruction(LatencyTable& table, const AnalyzedBenchmark& a, const InstructionSpec& spec) {
  const auto key = spec.key();
  if (const auto* found = table.find(key)) {
    auto existing = *found;
    widen(existing, a.value, a.bench.id);
    if (a.mapping && !a.mapping->matched && !existing.mapping_mismatch) {
      existing.mapping_mismatch = true;
      existing.mapping = a.mapping->observed_mapping();
      existing.mapping.ptx_signature = key;
    }
    table.put(std::move(existing));
    return;
  }
  LatencyRecord r;
  r.signature = key;
  r.cycles_min = r.cycles_max = a.value;
  r.source = Source::measured;
  if (!a.mapping) {
    r.mapping.ptx_signature = key;
    r.mapping.multi_instruction = true;
    r.note = "mapping not verified";
  } else if (a.mapping->matched) {
    r.mapping = a.mapping->expected;
  } else {
    r.mapping = a.mapping->observed_mapping();
    r.mapping_mismatch = true;
    r.note = fmt::format("observed SASS differs from the expected {}", a.mapping->expected.notation());
  }
  r.mapping.ptx_signature = key;
  table.add(std::move(r));
}

}  // namespace

LatencyTable build_latency_table(const std::vector<AnalyzedBenchmark>& results, const AnalysisConfig& cfg,
                                 std::vector<std::string>* notes) {
  using codegen::BenchKind;
  LatencyTable table;
  auto note = [notes](std::string msg) {
    if (notes) notes->push_back(std::move(msg));
  };
  for (const auto& a : results) {
    if (a.bench.clock_width == codegen::ClockWidth::bits32) {
      note(fmt::format("{}: 32-bit clock reads add a barrier to the timed region; not tabulated", a.bench.id));
      continue;
    }
    switch (a.bench.kind) {
      case BenchKind::clock_overhead: {
        const auto v = boost::rational_cast<double>(a.value);
        const auto rounded = static_cast<std::int64_t>(std::llround(v));
        if (table.clock_overhead() && *table.clock_overhead() != rounded) {
          note(fmt::format("{}: clock overhead {} disagrees with {}; keeping the first", a.bench.id, rounded,
                           *table.clock_overhead()));
        } else {
          table.set_clock_overhead(rounded);
        }
        break;
      }
      case BenchKind::alu: {
        const auto* spec = a.bench.instruction();
        if (!spec) throw ValidationError(fmt::format("{}: ALU benchmark without an instruction", a.bench.id));
        if (spec->count <= cfg.warmup_discard) {
          note(fmt::format("{}: {} instruction(s) is a launch-curve sample; not tabulated", a.bench.id, spec->count));
          break;
        }
        add_instruction(table, a, *spec);
        break;
      }
      case BenchKind::memory:
      case BenchKind::shared: {
        const auto* level = a.bench.memory_level();
        if (!level) throw ValidationError(fmt::format("{}: memory benchmark without a level", a.bench.id));
        if (auto existing = table.memory_cycles(*level); existing && *existing != a.value) {
          note(fmt::format("{}: {} latency {} disagrees with {}; keeping the first", a.bench.id, to_string(*level),
                           format_cycles(a.value), format_cycles(*existing)));
          break;
        }
        table.set_memory(*level, {a.value, false});
        if (a.mapping && !a.mapping->matched) {
          note(fmt::format("{}: observed SASS {} differs from the expected {}", a.bench.id,
                           a.mapping->observed_mapping().notation(), a.mapping->expected.notation()));
        }
        break;
      }
      case BenchKind::wmma: {
        const auto* bench_op = a.bench.tensor_op();
        if (!bench_op) throw ValidationError(fmt::format("{}: wmma benchmark without an op", a.bench.id));
        auto op = *bench_op;
        op.iters = 1;
        if (a.value.denominator() == 1 && op.sass_count > 0 && a.value.numerator() % op.sass_count == 0) {
          op.per_sass_cycles = static_cast<int>(a.value.numerator() / op.sass_count);
        } else {
          note(fmt::format("{}: latency {} does not split over {} SASS instruction(s)", a.bench.id,
                           format_cycles(a.value), op.sass_count));
          op.sass_count = 1;
          op.per_sass_cycles = static_cast<int>(std::llround(boost::rational_cast<double>(a.value)));
        }
        op.measured_throughput.reset();
        if (a.throughput) {
          op.measured_throughput = round_micro(a.throughput->measured);
          op.theoretical_throughput = a.throughput->theoretical;
        }
        if (const auto* existing = table.find_tensor_op(op.signature());
            existing && existing->total_cycles() != op.total_cycles()) {
          note(fmt::format("{}: tensor latency {} disagrees with {}; keeping the first", a.bench.id,
                           op.total_cycles(), existing->total_cycles()));
          break;
        }
        if (a.mapping && !a.mapping->matched) {
          note(fmt::format("{}: observed SASS {} differs from the expected {}", a.bench.id,
                           a.mapping->observed_mapping().notation(), a.mapping->expected.notation()));
        }
        table.put_tensor_op(std::move(op));
        break;
      }
    }
  }
  return table;
}

}  // namespace ptxlat::analysis
