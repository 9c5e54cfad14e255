#include "hlab/io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace hlab {

namespace {

template <class T> void put(unsigned char *out, std::size_t at, T value) {
    static_assert(std::is_integral_v<T>);
    const auto v = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out[at + i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    }
}

void put_f64(unsigned char *out, std::size_t at, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof bits);
    put(out, at, bits);
}

template <class T> T get(const std::vector<unsigned char> &in, std::size_t at) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    }
    return static_cast<T>(v);
}

double get_f64(const std::vector<unsigned char> &in, std::size_t at) {
    const auto bits = get<std::uint64_t>(in, at);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace

std::vector<unsigned char> encode_raw(const ScalarField &field, double time) {
    const GridSpec &g = field.grid();
    std::array<unsigned char, raw_header_bytes> head{};
    std::memcpy(head.data(), "HLAB", 4);
    put<std::uint16_t>(head.data(), 4, raw_version);
    head[6] = static_cast<unsigned char>(g.dim());
    head[7] = g.periodic() ? 0 : 1;
    for (int a = 0; a < 3; ++a) {
        put<std::uint32_t>(head.data(), 8 + 4 * a, static_cast<std::uint32_t>(g.count(a)));
        put_f64(head.data(), 32 + 8 * a, g.extent(a));
    }
    put_f64(head.data(), 24, time);
    put<std::uint64_t>(head.data(), 56, field.size());
    std::vector<unsigned char> out(raw_header_bytes + 8 * field.size(), 0);
    std::copy(head.begin(), head.end(), out.begin());
    for (std::size_t i = 0; i < field.size(); ++i) {
        put_f64(out.data(), raw_header_bytes + 8 * i, field[i]);
    }
    return out;
}

RawSnapshot decode_raw(const std::vector<unsigned char> &bytes) {
    if (bytes.size() < raw_header_bytes || std::memcmp(bytes.data(), "HLAB", 4) != 0) {
        throw std::runtime_error("not an HLAB raw snapshot");
    }
    if (get<std::uint16_t>(bytes, 4) != raw_version) {
        throw std::runtime_error("unsupported HLAB raw snapshot version");
    }
    const int dim = bytes[6];
    const Topology topo = bytes[7] == 0 ? Topology::periodic : Topology::box;
    std::array<int, 3> count{};
    std::array<double, 3> extent{};
    for (int a = 0; a < 3; ++a) {
        count[a] = static_cast<int>(get<std::uint32_t>(bytes, 8 + 4 * a));
        extent[a] = get_f64(bytes, 32 + 8 * a);
    }
    const GridSpec grid(dim, extent, count, topo);
    const auto n = get<std::uint64_t>(bytes, 56);
    if (n != grid.size() || bytes.size() != raw_header_bytes + 8 * n) {
        throw std::runtime_error("HLAB raw snapshot size does not match its header");
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = get_f64(bytes, raw_header_bytes + 8 * i);
    }
    return {get_f64(bytes, 24), ScalarField(grid, std::move(values))};
}

void write_raw(const std::string &path, const ScalarField &field, double time) {
    const auto bytes = encode_raw(field, time);
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    os.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RawSnapshot read_raw(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_raw(bytes);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string &path, const ScalarField &field, const std::string &value_name) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    const GridSpec &g = field.grid();
    static const char *axis[] = {"x", "y", "z"};
    for (int a = 0; a < g.dim(); ++a) {
        os << axis[a] << ',';
    }
    os << value_name << '\n';
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Point p = g.node(i);
        for (int a = 0; a < g.dim(); ++a) {
            os << format_double(p[a]) << ',';
        }
        os << format_double(field[i]) << '\n';
    }
}

}  // namespace hlab
