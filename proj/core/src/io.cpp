#include "fpblock/io.hpp"

#include "fpblock/error.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace fpblock {
namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
T byteswap_if_big(T value) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        std::memcpy(&value, bytes, sizeof(T));
    }
    return value;
}

template <class T>
void write_le(std::ostream& os, const std::vector<T>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(T)));
    } else {
        for (T x : data) {
            x = byteswap_if_big(x);
            os.write(reinterpret_cast<const char*>(&x), sizeof(T));
        }
    }
    if (!os) throw IoError("write failed");
}

template <class T>
void read_le(std::istream& is, std::vector<T>& data) {
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(T)));
    if (is.gcount() != static_cast<std::streamsize>(data.size() * sizeof(T))) {
        throw IoError("truncated payload: expected " + std::to_string(data.size()) + " values");
    }
    for (T& x : data) x = byteswap_if_big(x);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
            try {
                std::size_t used = 0;
                value = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw IoError("bad value '" + item + "' for header field " + key);
            }
        } else {
            auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
            if (ec != std::errc() || p != item.data() + item.size()) {
                throw IoError("bad value '" + item + "' for header field " + key);
            }
        }
        out.push_back(value);
    }
    return out;
}

struct Header {
    Grid grid;
    std::map<std::string, std::string> fields;
};

Header read_header(std::istream& is, const std::string& magic) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("missing " + magic + " header");
    std::istringstream ss(line);
    std::string word, version;
    ss >> word >> version;
    if (word != magic || version != "v1") {
        throw IoError("expected '" + magic + " v1' header, got '" + line.substr(0, 40) + "'");
    }
    Header h;
    while (ss >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw IoError("malformed header field '" + word + "'");
        h.fields[word.substr(0, eq)] = word.substr(eq + 1);
    }
    for (const char* key : {"dim", "n", "lo", "hi"}) {
        if (!h.fields.count(key)) throw IoError(magic + " header lacks " + key);
    }
    const auto dim = parse_list<int>("dim", h.fields["dim"]);
    const auto n = parse_list<int>("n", h.fields["n"]);
    const auto lo = parse_list<double>("lo", h.fields["lo"]);
    const auto hi = parse_list<double>("hi", h.fields["hi"]);
    if (dim.size() != 1 || n.size() != static_cast<std::size_t>(dim[0]) || lo.size() != n.size() ||
        hi.size() != n.size()) {
        throw IoError(magic + " header has inconsistent dimensions");
    }
    try {
        h.grid = Grid(lo, hi, n);
    } catch (const ConfigurationError& e) {
        throw IoError(std::string("invalid grid in header: ") + e.what());
    }
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    return is;
}

}  // namespace

std::string grid_header(const std::string& magic, const Grid& grid) {
    std::string n, lo, hi;
    for (int k = 0; k < grid.dim(); ++k) {
        const char* sep = k ? "," : "";
        n += sep + std::to_string(grid.n(k));
        lo += sep + fmt_double(grid.lo(k));
        hi += sep + fmt_double(grid.hi(k));
    }
    return magic + " v1 dim=" + std::to_string(grid.dim()) + " n=" + n + " lo=" + lo + " hi=" + hi;
}

void write_fpgrid(std::ostream& os, const DensityField& field) {
    os << grid_header("fpgrid", field.grid) << '\n';
    write_le(os, field.values);
}

DensityField read_fpgrid(std::istream& is) {
    Header h = read_header(is, "fpgrid");
    DensityField field(h.grid);
    read_le(is, field.values);
    return field;
}

void save_fpgrid(const std::filesystem::path& path, const DensityField& field) {
    auto os = open_out(path);
    write_fpgrid(os, field);
}

DensityField load_fpgrid(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_fpgrid(is);
}

void write_fphist(std::ostream& os, const Histogram& hist) {
    os << grid_header("fphist", hist.grid) << " total=" << hist.total_retained << '\n';
    write_le(os, hist.counts);
}

Histogram read_fphist(std::istream& is) {
    Header h = read_header(is, "fphist");
    if (!h.fields.count("total")) throw IoError("fphist header lacks total");
    Histogram hist(h.grid);
    const auto total = parse_list<std::uint64_t>("total", h.fields["total"]);
    if (total.size() != 1) throw IoError("bad total in fphist header");
    hist.total_retained = total[0];
    read_le(is, hist.counts);
    if (hist.in_domain() > hist.total_retained) {
        throw IoError("fphist counts exceed the recorded total");
    }
    return hist;
}

void save_fphist(const std::filesystem::path& path, const Histogram& hist) {
    auto os = open_out(path);
    write_fphist(os, hist);
}

Histogram load_fphist(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_fphist(is);
}

void write_field_csv(std::ostream& os, const DensityField& field) {
    const Grid& g = field.grid;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.cell_center(g.unflat(c));
        for (int k = 0; k < g.dim(); ++k) os << fmt_double(x[k]) << ',';
        os << fmt_double(field.values[c]) << '\n';
    }
    if (!os) throw IoError("CSV write failed");
}

}  // namespace fpblock
