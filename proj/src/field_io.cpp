#include "homog/field_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "homog/errors.hpp"

namespace homog {
namespace {

constexpr std::array<char, 8> kMagic{'H', 'O', 'M', 'O', 'G', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

template <class T>
void put(std::ostream& os, T value)
{
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is)
{
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw IoError("truncated binary field file");
    return value;
}

void put_string(std::ostream& os, const std::string& s)
{
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is)
{
    const auto n = get<std::uint32_t>(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw IoError("truncated binary field file");
    return s;
}

std::string header_value(const std::string& line, const std::string& key)
{
    const std::string token = " " + key + "=";
    const auto pos = line.find(token);
    if (pos == std::string::npos) throw IoError("field header missing '" + key + "'");
    const auto start = pos + token.size();
    const auto end = line.find(' ', start);
    return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in field file");
    return v;
}

std::uint64_t parse_u64(const std::string& s)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad integer '" + s + "' in field file");
    return v;
}

FieldRecord read_binary(std::istream& is)
{
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (magic != kMagic) throw IoError("not a binary field file");
    if (get<std::uint32_t>(is) != kVersion) throw IoError("unsupported binary field version");
    FieldRecord rec;
    const auto d = static_cast<int>(get<std::uint32_t>(is));
    const auto n = get<std::uint64_t>(is);
    const auto r = get<double>(is);
    rec.grid = PeriodicGrid(d, n, r);
    rec.seed = get<std::uint64_t>(is);
    rec.arrays = get<std::uint32_t>(is);
    rec.kind = get_string(is);
    rec.law = get_string(is);
    rec.values.resize(rec.arrays * rec.grid.size());
    is.read(reinterpret_cast<char*>(rec.values.data()), static_cast<std::streamsize>(rec.values.size() * sizeof(double)));
    if (!is) throw IoError("truncated binary field file");
    return rec;
}

FieldRecord read_csv(std::istream& is)
{
    FieldRecord rec;
    std::string line;
    std::string meta;
    bool have_meta = false;
    while (std::getline(is, line)) {
        if (line.rfind("# law=", 0) == 0) {
            rec.law = line.substr(6);
        } else if (line.rfind("# kind=", 0) == 0) {
            meta = line;
            have_meta = true;
        } else if (line.rfind('#', 0) == 0) {
            continue;
        } else {
            break; // column header
        }
    }
    if (!have_meta) throw IoError("field CSV is missing its '# kind=' header line");
    rec.kind = header_value(meta, "kind");
    rec.grid = PeriodicGrid(static_cast<int>(parse_u64(header_value(meta, "d"))), parse_u64(header_value(meta, "N")),
                            parse_double(header_value(meta, "R")));
    rec.seed = parse_u64(header_value(meta, "seed"));
    rec.arrays = parse_u64(header_value(meta, "arrays"));
    rec.values.assign(rec.arrays * rec.grid.size(), 0.0);
    std::vector<bool> seen(rec.values.size(), false);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            throw IoError("malformed field CSV row: " + line);
        const auto k = parse_u64(a), i = parse_u64(b);
        if (k >= rec.arrays || i >= rec.grid.size()) throw IoError("field CSV index out of range: " + line);
        const std::size_t j = k * rec.grid.size() + i;
        rec.values[j] = parse_double(c);
        seen[j] = true;
    }
    for (bool s : seen)
        if (!s) throw IoError("field CSV is missing values");
    return rec;
}

} // namespace

std::string format_double(double x)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

EdgeCoefficientField FieldRecord::coefficients() const
{
    if (arrays != static_cast<std::size_t>(grid.dim()))
        throw IoError("field file holds " + std::to_string(arrays) + " arrays; coefficients need d arrays");
    return make_coefficients(grid, values);
}

void write_field(const std::filesystem::path& path, const FieldRecord& rec, FieldFormat format)
{
    if (rec.values.size() != rec.arrays * rec.grid.size()) throw IoError("field record length mismatch");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    if (format == FieldFormat::binary) {
        os.write(kMagic.data(), kMagic.size());
        put<std::uint32_t>(os, kVersion);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(rec.grid.dim()));
        put<std::uint64_t>(os, rec.grid.cells());
        put<double>(os, rec.grid.side());
        put<std::uint64_t>(os, rec.seed);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(rec.arrays));
        put_string(os, rec.kind);
        put_string(os, rec.law);
        os.write(reinterpret_cast<const char*>(rec.values.data()),
                 static_cast<std::streamsize>(rec.values.size() * sizeof(double)));
    } else {
        os << "# homog field v1\n";
        os << "# kind=" << rec.kind << " d=" << rec.grid.dim() << " N=" << rec.grid.cells()
           << " R=" << format_double(rec.grid.side()) << " seed=" << rec.seed << " arrays=" << rec.arrays << '\n';
        os << "# law=" << rec.law << '\n';
        os << "direction,cell,value\n";
        for (std::size_t k = 0; k < rec.arrays; ++k)
            for (std::size_t i = 0; i < rec.grid.size(); ++i)
                os << k << ',' << i << ',' << format_double(rec.values[k * rec.grid.size() + i]) << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
}

FieldRecord read_field(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open field file " + path.string());
    std::array<char, 8> head{};
    is.read(head.data(), head.size());
    const bool binary = is.gcount() == 8 && head == kMagic;
    is.clear();
    is.seekg(0);
    return binary ? read_binary(is) : read_csv(is);
}

} // namespace homog
