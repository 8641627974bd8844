#include "crtlab/path_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace crtlab {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'T', 'L', 'A', 'B', 'P', '1'};

template <class T>
void put(std::ostream& os, T x) {
    static_assert(std::endian::native == std::endian::little, "path files assume a little-endian host");
    char buf[sizeof(T)];
    std::memcpy(buf, &x, sizeof(T));
    os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& file) {
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) throw std::runtime_error(file + ": truncated path file");
    T x;
    std::memcpy(&x, buf, sizeof(T));
    return x;
}

}  // namespace

void save_path(const ExcursionPath& path, const std::string& file) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error(file + ": cannot open for writing");
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kPathFormatVersion);
    put<double>(os, path.mech.alpha());
    put<double>(os, path.mech.c());
    put<double>(os, path.dt);
    put<std::uint64_t>(os, path.values.size());
    os.write(reinterpret_cast<const char*>(path.values.data()),
             static_cast<std::streamsize>(path.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error(file + ": write failed");
}

ExcursionPath load_path(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error(file + ": cannot open for reading");
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error(file + ": not a path file");
    const auto version = get<std::uint32_t>(is, file);
    if (version != kPathFormatVersion) throw std::runtime_error(file + ": unsupported version " + std::to_string(version));
    const double alpha = get<double>(is, file);
    const double c = get<double>(is, file);
    ExcursionPath p;
    p.mech = BranchingMechanism(alpha, c);
    p.dt = get<double>(is, file);
    const auto n = get<std::uint64_t>(is, file);
    p.values.resize(n);
    if (!is.read(reinterpret_cast<char*>(p.values.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw std::runtime_error(file + ": truncated payload");
    p.validate();
    return p;
}

}  // namespace crtlab
