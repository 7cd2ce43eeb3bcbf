#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spdc/ast.hpp"
#include "spdc/stream.hpp"

namespace spdc {

void Stream::frame_every(size_t frame_len) {
    if (frame_len == 0)
        fail(Errc::SizeMismatch, "frame length must be positive");
    for (size_t i = 0; i < size(); ++i) {
        sop[i] = i % frame_len == 0;
        eop[i] = (i + 1) % frame_len == 0 || i + 1 == size();
    }
}

namespace {

constexpr char kMagic[] = "spdstream 1";

uint32_t load_le32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 |
           static_cast<uint32_t>(p[3]) << 24;
}

void store_le32(unsigned char* p, uint32_t w) {
    p[0] = static_cast<unsigned char>(w);
    p[1] = static_cast<unsigned char>(w >> 8);
    p[2] = static_cast<unsigned char>(w >> 16);
    p[3] = static_cast<unsigned char>(w >> 24);
}

}  // namespace

Stream read_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::FileNotFound, "cannot open stream file: " + path);

    auto bad = [&](const std::string& why) -> void {
        fail(Errc::BadStreamFile, path + ": " + why);
    };

    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        bad("missing 'spdstream 1' header");

    Stream s;
    size_t n_vectors = 0;
    std::vector<size_t> starts;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "fields") {
            size_t n = 0;
            ls >> n;
            std::string name;
            while (ls >> name) s.fields.push_back(name);
            if (s.fields.size() != n) bad("field count disagrees with names");
        } else if (key == "vectors") {
            ls >> n_vectors;
        } else if (key == "frames") {
            size_t k = 0;
            ls >> k;
            size_t v;
            while (ls >> v) starts.push_back(v);
            if (starts.size() != k) bad("frame count disagrees with starts");
        } else if (key == "data") {
            break;
        } else {
            bad("unknown header line '" + key + "'");
        }
    }
    if (s.fields.empty()) bad("no fields declared");

    size_t words = n_vectors * s.fields.size();
    std::vector<unsigned char> raw(words * 4);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        bad("truncated data section");

    s.data.assign(n_vectors, std::vector<uint32_t>(s.fields.size()));
    for (size_t v = 0; v < n_vectors; ++v)
        for (size_t f = 0; f < s.fields.size(); ++f)
            s.data[v][f] = load_le32(&raw[(v * s.fields.size() + f) * 4]);

    s.sop.assign(n_vectors, 0);
    s.eop.assign(n_vectors, 0);
    if (starts.empty()) {
        s.frame_all();
    } else {
        if (starts.front() != 0) bad("first frame must start at vector 0");
        for (size_t i = 0; i < starts.size(); ++i) {
            if (starts[i] >= n_vectors && n_vectors > 0)
                bad("frame start beyond stream end");
            s.sop[starts[i]] = 1;
            size_t end = (i + 1 < starts.size() ? starts[i + 1] : n_vectors);
            if (end <= starts[i]) bad("frame starts must ascend");
            s.eop[end - 1] = 1;
        }
    }
    return s;
}

void write_stream(const Stream& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot write stream file: " + path);

    out << kMagic << "\n";
    out << "fields " << s.fields.size();
    for (const auto& f : s.fields) out << " " << f;
    out << "\n";
    out << "vectors " << s.size() << "\n";
    std::vector<size_t> starts;
    for (size_t i = 0; i < s.size(); ++i)
        if (s.sop[i]) starts.push_back(i);
    out << "frames " << starts.size();
    for (size_t v : starts) out << " " << v;
    out << "\n";
    out << "data\n";

    std::vector<unsigned char> raw(s.size() * s.fields.size() * 4);
    for (size_t v = 0; v < s.size(); ++v)
        for (size_t f = 0; f < s.fields.size(); ++f)
            store_le32(&raw[(v * s.fields.size() + f) * 4], s.data[v][f]);
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) fail(Errc::IoError, "short write to " + path);
}

Stream read_stream_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::FileNotFound, "cannot open stream file: " + path);

    Stream s;
    std::string line;
    if (!std::getline(in, line))
        fail(Errc::BadStreamFile, path + ": empty CSV");
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) s.fields.push_back(cell);
    }
    std::vector<bool> raw_field;
    for (const auto& f : s.fields)
        raw_field.push_back(classify_port(f) == PortClass::Raw);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<uint32_t> row;
        size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= s.fields.size())
                fail(Errc::BadStreamFile, path + ": too many columns");
            if (raw_field[col])
                row.push_back(
                    static_cast<uint32_t>(std::strtoul(cell.c_str(), nullptr, 0)));
            else
                row.push_back(
                    float_to_word(std::strtof(cell.c_str(), nullptr)));
            ++col;
        }
        if (row.size() != s.fields.size())
            fail(Errc::BadStreamFile, path + ": short row");
        s.push(std::move(row));
    }
    s.frame_all();
    return s;
}

void write_stream_csv(const Stream& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::IoError, "cannot write stream file: " + path);
    for (size_t f = 0; f < s.fields.size(); ++f)
        out << (f ? "," : "") << s.fields[f];
    out << "\n";
    std::vector<bool> raw_field;
    for (const auto& f : s.fields)
        raw_field.push_back(classify_port(f) == PortClass::Raw);
    char buf[48];
    for (const auto& row : s.data) {
        for (size_t f = 0; f < row.size(); ++f) {
            if (raw_field[f])
                std::snprintf(buf, sizeof buf, "%" PRIu32, row[f]);
            else
                std::snprintf(buf, sizeof buf, "%.9g", word_to_float(row[f]));
            out << (f ? "," : "") << buf;
        }
        out << "\n";
    }
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Stream read_stream_auto(const std::string& path) {
    return ends_with(path, ".csv") ? read_stream_csv(path)
                                   : read_stream(path);
}

void write_stream_auto(const Stream& s, const std::string& path) {
    if (ends_with(path, ".csv"))
        write_stream_csv(s, path);
    else
        write_stream(s, path);
}

}  // namespace spdc
