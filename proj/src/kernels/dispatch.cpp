#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace occupancy::kernels {

#if !(defined(__x86_64__) || defined(_M_X64))
const KernelTable* avx2_table_compiled() noexcept { return nullptr; }
#endif
#if !defined(__aarch64__)
const KernelTable* neon_table_compiled() noexcept { return nullptr; }
#endif

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* avx2_table() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? avx2_table_compiled() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() noexcept { return neon_table_compiled(); }

namespace {

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return &scalar_table();
        case Isa::Avx2: return avx2_table();
        case Isa::Neon: return neon_table();
    }
    return nullptr;
}

const KernelTable* initial_table() noexcept {
    if (const char* env = std::getenv("OCCUPANCY_ISA")) {
        const std::string_view want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == isa_name(isa)) {
                if (const KernelTable* t = table_for(isa)) return t;
            }
        }
    }
    if (const KernelTable* t = avx2_table()) return t;
    if (const KernelTable* t = neon_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(Isa isa) noexcept {
    const KernelTable* t = table_for(isa);
    if (!t) return false;
    current().store(t, std::memory_order_release);
    return true;
}

}  // namespace occupancy::kernels
