// Checkpoint file layout (all integers little-endian):
//
//   magic "CQACKPT\0" | u32 version | u32 stage | u64 seed | str config_hash
//   u64 n_tokens, str tokens... | u64 oov_buckets | u64 dim
//   u64 n_params, f64 params... | u64 adam_step
//   u64 n_m, f64 m... | u64 n_v, f64 v...
//
// where str = u64 length + bytes and f64 is the IEEE-754 bit pattern.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "chronoqa/corpus_io.hpp"
#include "chronoqa/errors.hpp"
#include "chronoqa/harness.hpp"

namespace chronoqa {
namespace {

constexpr char kMagic[8] = {'C', 'Q', 'A', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        out_.append(s);
    }
    void reals(std::span<const double> v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void raw(const char* p, std::size_t n) { out_.append(p, n); }
    const std::string& bytes() const { return out_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
    std::string out_;
};

class Reader {
public:
    Reader(std::string data, std::string source) : data_(std::move(data)), source_(std::move(source)) {}

    std::uint64_t le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u64();
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::vector<double> reals() {
        const auto n = u64();
        need(n * 8);
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::string_view raw(std::size_t n) {
        need(n);
        std::string_view s(data_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == data_.size(); }
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(source_ + ": " + what + " (offset " + std::to_string(pos_) + ")");
    }

private:
    void need(std::uint64_t n) const {
        if (n > data_.size() - pos_) fail("truncated checkpoint");
    }
    std::string data_;
    std::string source_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const StageCheckpoint& ckpt) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(ckpt.stage));
    w.u64(ckpt.seed);
    w.str(ckpt.config_hash);
    w.u64(ckpt.vocab.tokens().size());
    for (const auto& t : ckpt.vocab.tokens()) w.str(t);
    w.u64(ckpt.vocab.oov_buckets());
    w.u64(ckpt.params.dim());
    w.reals(ckpt.params.values());
    w.u64(ckpt.optimizer.step);
    w.reals(ckpt.optimizer.first_moment);
    w.reals(ckpt.optimizer.second_moment);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_text_file(path, w.bytes());
}

StageCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open checkpoint " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Reader r(buf.str(), path.string());

    if (r.raw(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic)) r.fail("not a checkpoint file");
    const auto version = r.u32();
    if (version != kVersion) r.fail("unsupported checkpoint version " + std::to_string(version));

    StageCheckpoint ckpt;
    ckpt.stage = static_cast<int>(r.u32());
    ckpt.seed = r.u64();
    ckpt.config_hash = r.str();
    const auto n_tokens = r.u64();
    std::vector<std::string> tokens;
    tokens.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n_tokens, 1u << 20)));
    for (std::uint64_t i = 0; i < n_tokens; ++i) tokens.push_back(r.str());
    const auto oov = r.u64();
    ckpt.vocab = Vocabulary(std::move(tokens), oov);
    const auto dim = r.u64();
    const auto values = r.reals();
    ckpt.params = ModelParams(ckpt.vocab.size(), dim);
    if (values.size() != ckpt.params.size()) {
        r.fail("parameter count " + std::to_string(values.size()) + " does not match vocabulary and dimension");
    }
    std::copy(values.begin(), values.end(), ckpt.params.values().begin());
    ckpt.optimizer.step = r.u64();
    ckpt.optimizer.first_moment = r.reals();
    ckpt.optimizer.second_moment = r.reals();
    if (!r.at_end()) r.fail("trailing bytes");
    return ckpt;
}

}  // namespace chronoqa
