// Throughput of the samplers: serial reference against the OpenMP map, and
// the stepwise chain against the jump-ahead chain.
//
//   udag_bench [--n N] [--count C] [--workers W]
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <string>

#include "udag/chain.hpp"
#include "udag/parallel.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const std::string& name, std::int64_t count, double secs, std::int64_t checksum) {
  std::cout << name << ": " << count << " samples in " << secs << " s, " << count / secs
            << " samples/s (checksum " << checksum << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n = 1'000'000;
  std::int64_t count = 2000;
  int workers = udag::default_workers();
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string arg = argv[i];
    if (arg == "--n") n = std::stoll(argv[i + 1]);
    else if (arg == "--count") count = std::stoll(argv[i + 1]);
    else if (arg == "--workers") workers = std::stoi(argv[i + 1]);
    else {
      std::cerr << "unknown option " << arg << '\n';
      return 2;
    }
  }

  for (int d : {2, 3}) {
    udag::ChainParams p;
    p.d = d;
    p.n = n;
    auto kernel = [&](std::int64_t, udag::Rng& rng) { return udag::sample_x(p, rng).x; };
    std::vector<std::int64_t> serial, parallel;
    const double ts = seconds([&] { serial = udag::serial_map<std::int64_t>(count, 1, kernel); });
    const double tp = seconds([&] { parallel = udag::parallel_map<std::int64_t>(count, workers, 1, kernel); });
    const auto sum = [](const auto& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); };
    std::cout << "d=" << d << " n=" << n << '\n';
    report("  serial_map   chain", count, ts, sum(serial));
    report("  parallel_map chain (" + std::to_string(workers) + " workers)", count, tp, sum(parallel));
    if (serial != parallel) {
      std::cerr << "serial and parallel results differ\n";
      return 1;
    }
  }

  // Full trajectories: every k visited versus jumps between hits.
  udag::ChainParams p;
  p.n = std::min<std::int64_t>(n, 100'000);
  const std::int64_t paths = std::max<std::int64_t>(1, count / 20);
  for (auto [name, method] : {std::pair{"stepwise", udag::PathMethod::stepwise},
                              std::pair{"jump", udag::PathMethod::jump}}) {
    std::int64_t total = 0;
    const double t = seconds([&] {
      const auto xs = udag::serial_map<std::int64_t>(paths, 2, [&](std::int64_t, udag::Rng& rng) {
        return udag::record_path(p, rng, method).x;
      });
      total = std::accumulate(xs.begin(), xs.end(), std::int64_t{0});
    });
    report(std::string("  record_path ") + name + " n=" + std::to_string(p.n), paths, t, total);
  }
  return 0;
}
