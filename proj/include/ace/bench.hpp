#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ace::bench {

struct Measurement {
    std::string name;
    double median_us = 0;    // per invocation
    double per_item_us = 0;  // amortized per item (batch benches)
    std::size_t samples = 0;
    std::size_t batch = 1;
    std::string note;
};

// Median-of-samples timer: `warmup` unrecorded runs, then `samples` timed
// runs, each averaging over `inner` invocations.
Measurement measure(const std::string& name, std::size_t warmup, std::size_t samples,
                    std::size_t inner, const std::function<void()>& fn);

std::string cpu_description();
unsigned core_count();

struct BenchReport {
    std::string title;
    std::string cpu;
    unsigned cores = 0;
    std::vector<Measurement> rows;
    std::vector<std::string> notes;

    std::string render_text() const;
    std::string render_csv() const;
};

BenchReport bench_crypto();
BenchReport bench_pipeline(const std::vector<std::size_t>& batch_sizes);

}  // namespace ace::bench
