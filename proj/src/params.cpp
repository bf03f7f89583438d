#include "dcrnn/params.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace dcrnn {

ParamId ParamSet::add(const std::string& group, const std::string& local, Tensor init) {
    Entry e{group, group + "." + local, std::move(init)};
    for (const Entry& prev : entries_)
        if (prev.name == e.name) raise(ErrorKind::Contract, "duplicate parameter name '", e.name, "'");
    entries_.push_back(std::move(e));
    return static_cast<ParamId>(entries_.size() - 1);
}

i64 ParamSet::total_scalars() const {
    i64 n = 0;
    for (const Entry& e : entries_) n += e.value.size();
    return n;
}

TapeBinding bind_all(Tape& tape, const ParamSet& params) {
    TapeBinding b;
    b.node_of.reserve(static_cast<std::size_t>(params.size()));
    for (ParamId id = 0; id < params.size(); ++id) b.node_of.push_back(tape.leaf(params.value(id)));
    return b;
}

std::vector<const Tensor*> collect_grads(const Tape& tape, const TapeBinding& binding, const ParamSet& params) {
    std::vector<const Tensor*> grads(static_cast<std::size_t>(params.size()), nullptr);
    for (ParamId id = 0; id < params.size(); ++id) {
        const NodeId node = binding[id];
        if (tape.has_grad(node)) grads[static_cast<std::size_t>(id)] = &tape.grad(node);
    }
    return grads;
}

namespace {

constexpr char kMagic[8] = {'D', 'C', 'R', 'N', 'C', 'K', 'P', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void save_checkpoint(const ParamSet& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) raise(ErrorKind::Io, "cannot open checkpoint for writing: ", path);
    os.write(kMagic, 8);
    put_u64(os, static_cast<std::uint64_t>(params.size()));
    for (ParamId id = 0; id < params.size(); ++id) {
        const ParamSet::Entry& e = params.entry(id);
        put_u64(os, e.name.size());
        os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        put_u64(os, static_cast<std::uint64_t>(e.value.shape().rank()));
        for (i64 d : e.value.shape().dims()) put_u64(os, static_cast<std::uint64_t>(d));
        if constexpr (std::endian::native == std::endian::little) {
            os.write(reinterpret_cast<const char*>(e.value.data()),
                     static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(e.value.size())));
        } else {
            for (i64 i = 0; i < e.value.size(); ++i) put_f64(os, e.value[i]);
        }
    }
    if (!os) raise(ErrorKind::Io, "write failed: ", path);
}

void load_checkpoint(ParamSet& params, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::Io, "cannot open checkpoint: ", path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) raise(ErrorKind::Data, "not a checkpoint file: ", path);
    const std::uint64_t count = get_u64(is);
    if (count != static_cast<std::uint64_t>(params.size()))
        raise(ErrorKind::Config, "checkpoint has ", count, " records but the model has ", params.size(),
              " parameters");
    for (ParamId id = 0; id < params.size(); ++id) {
        const std::uint64_t name_len = get_u64(is);
        std::string name(name_len, '\0');
        is.read(name.data(), static_cast<std::streamsize>(name_len));
        const std::uint64_t rank = get_u64(is);
        std::vector<i64> dims(rank);
        for (std::uint64_t d = 0; d < rank; ++d) dims[d] = static_cast<i64>(get_u64(is));
        Shape shape{std::move(dims)};
        const ParamSet::Entry& e = params.entry(id);
        if (name != e.name)
            raise(ErrorKind::Config, "checkpoint record '", name, "' does not match model parameter '", e.name, "'");
        if (shape != e.value.shape())
            raise(ErrorKind::Config, "checkpoint shape ", shape.str(), " does not match model shape ",
                  e.value.shape().str(), " for '", name, "'");
        Tensor& v = params.value(id);
        if constexpr (std::endian::native == std::endian::little) {
            is.read(reinterpret_cast<char*>(v.data()),
                    static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
        } else {
            for (i64 i = 0; i < v.size(); ++i) v[i] = get_f64(is);
        }
        if (!is) raise(ErrorKind::Data, "truncated checkpoint: ", path);
    }
}

}  // namespace dcrnn
