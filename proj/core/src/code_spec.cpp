#include "polarlab/code_spec.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace polarlab {

namespace {
bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }
} // namespace

int CodeSpec::n() const {
    int r = 0;
    for (int v = N; v > 1; v >>= 1)
        ++r;
    return r;
}

void CodeSpec::validate() const {
    if (!is_power_of_two(N) || N < 2)
        throw std::invalid_argument("N must be a power of two >= 2, got " + std::to_string(N));
    if (K <= 0 || K > N)
        throw std::invalid_argument("K must satisfy 0 < K <= N");
    if (m < 0 || m >= K)
        throw std::invalid_argument("m must satisfy 0 <= m < K");
    if (m > 0 && !crc_poly)
        throw std::invalid_argument("m > 0 requires a CRC polynomial");
    if (m > 0 && crc_poly->degree != m)
        throw std::invalid_argument("CRC polynomial degree does not match m");
}

CodeSpec make_code_spec(int N, int K, int m, const std::string& crc_hex) {
    CodeSpec s;
    s.N = N;
    s.K = K;
    s.m = m;
    if (m > 0)
        s.crc_poly = parse_crc_poly(crc_hex, m);
    s.validate();
    return s;
}

std::vector<std::uint8_t> Construction::frozen_mask() const {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(spec.N), 1);
    for (int i : info_set)
        mask[static_cast<std::size_t>(i)] = 0;
    return mask;
}

void Construction::validate() const {
    spec.validate();
    if (static_cast<int>(info_set.size()) != spec.K)
        throw std::invalid_argument("info_set size must equal K");
    if (static_cast<int>(frozen_set.size()) != spec.N - spec.K)
        throw std::invalid_argument("frozen_set size must equal N-K");
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(spec.N), 0);
    for (int i : info_set) {
        if (i < 0 || i >= spec.N || seen[static_cast<std::size_t>(i)])
            throw std::invalid_argument("info_set must be distinct indices in [N]");
        seen[static_cast<std::size_t>(i)] = 1;
    }
    for (int i : frozen_set) {
        if (i < 0 || i >= spec.N || seen[static_cast<std::size_t>(i)])
            throw std::invalid_argument("frozen_set must be the complement of info_set");
        seen[static_cast<std::size_t>(i)] = 1;
    }
    if (!std::is_sorted(info_set.begin(), info_set.end()))
        throw std::invalid_argument("info_set must be sorted ascending");
}

Construction make_construction(CodeSpec spec, std::vector<int> info_set) {
    std::sort(info_set.begin(), info_set.end());
    Construction c;
    c.spec = spec;
    c.info_set = std::move(info_set);
    std::vector<std::uint8_t> in_info(static_cast<std::size_t>(spec.N), 0);
    for (int i : c.info_set) {
        if (i < 0 || i >= spec.N)
            throw std::invalid_argument("info_set index out of range");
        in_info[static_cast<std::size_t>(i)] = 1;
    }
    c.frozen_set.reserve(static_cast<std::size_t>(spec.N - spec.K));
    for (int i = 0; i < spec.N; ++i)
        if (!in_info[static_cast<std::size_t>(i)])
            c.frozen_set.push_back(i);
    c.validate();
    return c;
}

Construction construction_from_frozen(CodeSpec spec, const std::vector<int>& frozen_set) {
    std::vector<std::uint8_t> frozen(static_cast<std::size_t>(spec.N), 0);
    for (int i : frozen_set) {
        if (i < 0 || i >= spec.N)
            throw std::invalid_argument("frozen index out of range");
        frozen[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<int> info;
    info.reserve(static_cast<std::size_t>(spec.K));
    for (int i = 0; i < spec.N; ++i)
        if (!frozen[static_cast<std::size_t>(i)])
            info.push_back(i);
    return make_construction(spec, std::move(info));
}

std::string construction_to_json(const Construction& c, const std::string& provenance_json) {
    nlohmann::ordered_json j;
    j["N"] = c.spec.N;
    j["K"] = c.spec.K;
    j["m"] = c.spec.m;
    if (c.spec.m > 0)
        j["crc_poly"] = crc_poly_to_string(*c.spec.crc_poly);
    j["info_set"] = c.info_set;
    if (!provenance_json.empty())
        j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    return j.dump(2) + "\n";
}

void save_construction(const Construction& c, const std::filesystem::path& file,
                       const std::string& provenance_json) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << construction_to_json(c, provenance_json);
}

Construction load_construction(const std::filesystem::path& file, std::string* provenance_out) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open construction file " + file.string());
    nlohmann::ordered_json j;
    in >> j;
    const int N = j.at("N").get<int>();
    const int K = j.at("K").get<int>();
    const int m = j.at("m").get<int>();
    std::string crc = m > 0 ? j.at("crc_poly").get<std::string>() : "";
    CodeSpec spec = make_code_spec(N, K, m, crc);
    std::vector<int> info = j.at("info_set").get<std::vector<int>>();
    Construction c = make_construction(spec, std::move(info));
    if (provenance_out)
        *provenance_out = j.contains("provenance") ? j["provenance"].dump() : "";
    return c;
}

} // namespace polarlab
