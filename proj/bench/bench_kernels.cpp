// Parallel kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "eigenfem/assembly.hpp"
#include "eigenfem/coefficients.hpp"
#include "eigenfem/geometry.hpp"
#include "eigenfem/mesh.hpp"
#include "eigenfem/reference.hpp"

namespace {

using namespace eigenfem;

const SimplicialMesh& mesh_for(int J) {
    static std::vector<std::pair<int, SimplicialMesh>> cache;
    for (auto& [j, m] : cache)
        if (j == J) return m;
    cache.emplace_back(J, generate_structured(StructuredKind::Mesh45, J));
    return cache.back().second;
}

void BM_GeometryParallel(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(compute_geometry_all(m));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(m.num_elements()));
}

void BM_GeometrySerial(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::geometry_serial(m));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(m.num_elements()));
}

void BM_AssembleParallel(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    auto c = catalog("ex5_1");
    for (auto _ : st) benchmark::DoNotOptimize(assemble(m, c));
}

void BM_AssembleSerial(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    auto c = catalog("ex5_1");
    for (auto _ : st) benchmark::DoNotOptimize(reference::assemble_serial(m, c));
}

void BM_MultiplyParallel(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    auto sys = assemble(m, catalog("ex5_1"));
    std::vector<double> x(sys.size(), 1.0), y(sys.size());
    for (auto _ : st) {
        sys.A.multiply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_MultiplySerial(benchmark::State& st) {
    const auto& m = mesh_for(static_cast<int>(st.range(0)));
    auto sys = assemble(m, catalog("ex5_1"));
    std::vector<double> x(sys.size(), 1.0), y(sys.size());
    for (auto _ : st) {
        reference::multiply_serial(sys.A, x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

} // namespace

BENCHMARK(BM_GeometryParallel)->Arg(81)->Arg(321);
BENCHMARK(BM_GeometrySerial)->Arg(81)->Arg(321);
BENCHMARK(BM_AssembleParallel)->Arg(81)->Arg(321)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleSerial)->Arg(81)->Arg(321)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplyParallel)->Arg(81)->Arg(321);
BENCHMARK(BM_MultiplySerial)->Arg(81)->Arg(321);

BENCHMARK_MAIN();
