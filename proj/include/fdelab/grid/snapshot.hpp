#pragma once

#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scalar_field.hpp"

namespace fdelab::snapshot {

inline constexpr char kMagic[8] = {'F', 'D', 'L', 'S', 'N', 'A', 'P', '1'};

namespace detail {
template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(bool(is), ErrorCode::FormatError, "truncated snapshot");
    return v;
}
}  // namespace detail

/// Binary record: magic, header, then node values in linear-index order.
inline void write_binary(std::ostream& os, const ScalarField& f) {
    using detail::put;
    const auto& g = f.grid();
    os.write(kMagic, sizeof(kMagic));
    put<std::int32_t>(os, g.dim());
    for (int a = 0; a < 3; ++a) put<std::uint64_t>(os, g.nodes(a));
    put<std::uint64_t>(os, g.time_nodes());
    for (int a = 0; a < 3; ++a) put<double>(os, g.lo(a));
    for (int a = 0; a < 3; ++a) put<double>(os, g.hi(a));
    put<double>(os, g.t_start());
    put<double>(os, g.t_end());
    put<double>(os, g.h());
    put<double>(os, g.dt());
    put<std::uint8_t>(os, f.nonnegative() ? 1 : 0);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.name().size()));
    os.write(f.name().data(), static_cast<std::streamsize>(f.name().size()));
    const auto v = f.values();
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline ScalarField read_binary(std::istream& is) {
    using detail::get;
    char magic[8];
    is.read(magic, sizeof(magic));
    require(bool(is) && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, ErrorCode::FormatError, "not a field snapshot");
    GridSpec s;
    s.n = get<std::int32_t>(is);
    for (int a = 0; a < 3; ++a) s.nodes[a] = get<std::uint64_t>(is);
    s.time_nodes = get<std::uint64_t>(is);
    for (int a = 0; a < 3; ++a) s.lo[a] = get<double>(is);
    for (int a = 0; a < 3; ++a) s.hi[a] = get<double>(is);
    s.t_start = get<double>(is);
    s.t_end = get<double>(is);
    (void)get<double>(is);
    (void)get<double>(is);
    const bool nonneg = get<std::uint8_t>(is) != 0;
    const auto len = get<std::uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    s.budget = std::size_t(-1);
    SpaceTimeGrid g(s);
    std::vector<double> v(g.size());
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    require(bool(is), ErrorCode::FormatError, "truncated snapshot values");
    return ScalarField(g, std::move(v), nonneg, name);
}

/// Comment header, then one row per time slice: t followed by the slice values.
inline void write_csv(std::ostream& os, const ScalarField& f) {
    const auto& g = f.grid();
    os << "# field," << f.name() << "\n# n," << g.dim() << "\n# nodes";
    for (int a = 0; a < g.dim(); ++a) os << ',' << g.nodes(a);
    os << "\n# time_nodes," << g.time_nodes() << "\n# box";
    for (int a = 0; a < g.dim(); ++a) os << ',' << g.lo(a) << ',' << g.hi(a);
    os << "\n# t_range," << g.t_start() << ',' << g.t_end() << "\n# h," << g.h() << "\n# dt," << g.dt() << '\n';
    os << std::setprecision(17);
    for (std::size_t k = 0; k < g.time_nodes(); ++k) {
        os << g.time(k);
        for (double v : f.slice(k)) os << ',' << v;
        os << '\n';
    }
}

}  // namespace fdelab::snapshot
