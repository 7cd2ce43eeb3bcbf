#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdc/diag.hpp"

namespace spdc {

// A stream of data vectors with packet framing. One vector occupies one
// enabled cycle on the wire; numeric fields hold binary32 bit patterns, raw
// fields opaque words. sop/eop mark packet boundaries (a multi-packet stream
// is how back-to-back frames are fed through a pipeline without draining
// it).
struct Stream {
    std::vector<std::string> fields;
    std::vector<std::vector<uint32_t>> data;  // [vector][field]
    std::vector<uint8_t> sop;                 // per vector
    std::vector<uint8_t> eop;

    size_t size() const { return data.size(); }
    size_t width() const { return fields.size(); }

    void push(std::vector<uint32_t> words, bool is_sop = false,
              bool is_eop = false) {
        data.push_back(std::move(words));
        sop.push_back(is_sop ? 1 : 0);
        eop.push_back(is_eop ? 1 : 0);
    }

    // Mark the whole stream as one packet: sop on the first vector, eop on
    // the last.
    void frame_all() {
        for (size_t i = 0; i < size(); ++i) {
            sop[i] = i == 0;
            eop[i] = i + 1 == size();
        }
    }

    // Split into consecutive packets of `frame_len` vectors each.
    void frame_every(size_t frame_len);
};

inline float word_to_float(uint32_t w) {
    float f;
    static_assert(sizeof(f) == sizeof(w));
    __builtin_memcpy(&f, &w, sizeof(f));
    return f;
}

inline uint32_t float_to_word(float f) {
    uint32_t w;
    __builtin_memcpy(&w, &f, sizeof(w));
    return w;
}

/// Binary stream file: a short text header (field names, vector count,
/// packet starts) followed by little-endian 32-bit words. Documented in
/// docs/outputs.md.
Stream read_stream(const std::string& path);
void write_stream(const Stream& s, const std::string& path);

/// CSV mode: header row of field names, one row per vector. Numeric fields
/// are written as floats (round-trip precision), raw fields as unsigned
/// integers. Framing collapses to a single packet.
Stream read_stream_csv(const std::string& path);
void write_stream_csv(const Stream& s, const std::string& path);

/// Dispatch on file extension: `.csv` uses CSV mode, everything else the
/// binary format.
Stream read_stream_auto(const std::string& path);
void write_stream_auto(const Stream& s, const std::string& path);

}  // namespace spdc
