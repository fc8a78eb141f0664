// SPDX-License-Identifier: Apache-2.0
#include "phpvd/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "phpvd/common/error.hpp"
#include "phpvd/common/process.hpp"

namespace phpvd::model {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

constexpr std::string_view kMagic = "PHPVDCK1";
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    template <typename T>
    void pod(T v) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out_.append(buf, sizeof(T));
    }
    void str(std::string_view s) {
        pod<std::uint64_t>(s.size());
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    void doubles(std::span<const double> d) {
        out_.append(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::string_view take(std::size_t n) {
        if (n > in_.size() - pos_) throw CheckpointFormatError("checkpoint truncated at byte " + std::to_string(pos_));
        const auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    template <typename T>
    T pod() {
        T v;
        std::memcpy(&v, take(sizeof(T)).data(), sizeof(T));
        return v;
    }
    std::string str() { return std::string(take(pod<std::uint64_t>())); }
    bool done() const noexcept { return pos_ == in_.size(); }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Model& m) {
    Writer w;
    w.raw(kMagic);
    w.pod(kVersion);
    w.str(m.arch().to_json());
    w.str(m.arch().hash());
    w.str(m.vocab.version());
    w.str(m.vocab.serialize());
    w.str(m.keep.serialize());
    const auto named = m.params.named();
    w.pod<std::uint64_t>(named.size());
    for (const auto& [name, t] : named) {
        w.str(name);
        w.pod<std::uint32_t>(static_cast<std::uint32_t>(t.dim()));
        for (auto d : t.shape()) w.pod<std::uint64_t>(d);
        w.doubles(t.data());
    }
    return w.take();
}

Model parse_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    if (r.take(kMagic.size()) != kMagic) throw CheckpointFormatError("not a phpvd checkpoint");
    if (const auto v = r.pod<std::uint32_t>(); v != kVersion) {
        throw CheckpointFormatError("unsupported checkpoint version " + std::to_string(v));
    }
    ArchitectureConfig arch;
    try {
        arch = ArchitectureConfig::from_json(r.str());
        arch.validate();
    } catch (const CheckpointFormatError&) {
        throw;
    } catch (const Error& e) {
        throw CheckpointFormatError(std::string("bad architecture: ") + e.what());
    }
    if (r.str() != arch.hash()) throw CheckpointFormatError("architecture hash mismatch");
    const auto vocab_version = r.str();
    auto vocab = [&] {
        try {
            return php::Vocabulary::parse(r.str());
        } catch (const CheckpointFormatError&) {
            throw;
        } catch (const Error& e) {
            throw CheckpointFormatError(std::string("bad vocabulary: ") + e.what());
        }
    }();
    if (vocab.version() != vocab_version) throw CheckpointFormatError("vocabulary version mismatch");
    if (vocab.size() != arch.vocab_size) throw CheckpointFormatError("vocabulary size does not match architecture");
    auto keep = php::KeepList::parse(r.str());

    auto params = ModelParams::shaped(arch);
    const auto named = params.named();
    if (r.pod<std::uint64_t>() != named.size()) throw CheckpointFormatError("tensor count mismatch");
    for (const auto& [name, t] : named) {
        if (r.str() != name) throw CheckpointFormatError("expected tensor " + name);
        const auto ndim = r.pod<std::uint32_t>();
        if (ndim != t.dim()) throw CheckpointFormatError("rank mismatch for " + name);
        for (std::uint32_t i = 0; i < ndim; ++i) {
            if (r.pod<std::uint64_t>() != t.size(i)) throw CheckpointFormatError("shape mismatch for " + name);
        }
        auto dst = const_cast<tensor::Tensor&>(t).data();
        const auto payload = r.take(dst.size() * sizeof(double));
        std::memcpy(dst.data(), payload.data(), payload.size());
    }
    if (!r.done()) throw CheckpointFormatError("trailing bytes after the last tensor");
    return Model{std::move(params), std::move(vocab), std::move(keep)};
}

void save_checkpoint(const Model& m, const std::filesystem::path& path) { write_file(path, serialize_checkpoint(m)); }

Model load_checkpoint(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw MissingCheckpoint("no checkpoint at " + path.string());
    return parse_checkpoint(read_file(path));
}

}  // namespace phpvd::model
