// Snapshot layout (host byte order, little-endian on supported targets):
//
//   "GFPSNAP\0"  u32 version
//   str  config JSON
//   u8   fitted            u64 out_of_order_batches
//   u8   has_t_now         i64 t_now
//   u64  vertex count      { str account key }        in VertexId order
//   u64  seen id count     { str edge id }            sorted
//   u64  live edge count   { str id, u32 src, u32 dst, i64 ts, f64 attrs[A] }  log order
//   u64  stat attr count A' u64 state slots
//        { u8 present [ u64 removals, u64 peak_n, { u64 n, f64 mean, m2, m3, m4, peak_m2 } x A' ] }
//   u64  rebuild count
//
// str = u64 length + bytes.

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>

#include "gfp/preprocessor.hpp"
#include "preprocessor_state.hpp"

namespace gfp {

namespace {

constexpr char kMagic[8] = {'G', 'F', 'P', 'S', 'N', 'A', 'P', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    template <typename T>
    void pod(T value) {
        out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }
    void str(std::string_view s) {
        pod<std::uint64_t>(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T pod() {
        T value{};
        in_.read(reinterpret_cast<char*>(&value), sizeof(T));
        if (!in_) throw StateError("snapshot truncated");
        return value;
    }
    std::string str() {
        const auto n = pod<std::uint64_t>();
        if (n > (1ull << 32)) throw StateError("snapshot string length implausible");
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (!in_) throw StateError("snapshot truncated");
        return s;
    }

private:
    std::istream& in_;
};

}  // namespace

class SnapshotCodec {
public:
    static void save(const Preprocessor& engine, std::ostream& out) {
        Writer w(out);
        out.write(kMagic, sizeof(kMagic));
        w.pod(kVersion);
        w.str(to_json(engine.config_, -1));
        w.pod<std::uint8_t>(engine.fitted_ ? 1 : 0);
        w.pod<std::uint64_t>(engine.out_of_order_batches_);

        const GraphStore& g = engine.state_->graph;
        w.pod<std::uint8_t>(g.t_now_ ? 1 : 0);
        w.pod<std::int64_t>(g.t_now_.value_or(0));

        w.pod<std::uint64_t>(g.keys_.size());
        for (const auto& k : g.keys_) w.str(k);

        std::vector<std::string_view> seen(g.seen_ids_.begin(), g.seen_ids_.end());
        std::sort(seen.begin(), seen.end());
        w.pod<std::uint64_t>(seen.size());
        for (auto id : seen) w.str(id);

        w.pod<std::uint64_t>(g.live_edge_count());
        g.for_each_live_edge([&](const EdgeView& e) {
            w.str(e.edge_id);
            w.pod<std::uint32_t>(e.source);
            w.pod<std::uint32_t>(e.target);
            w.pod<std::int64_t>(e.timestamp);
            for (double a : e.attributes) w.pod(a);
        });

        const VertexStats& s = engine.state_->stats;
        w.pod<std::uint64_t>(s.attribute_count_);
        w.pod<std::uint64_t>(s.states_.size());
        for (const auto& st : s.states_) {
            const bool present = st.acc.size() == s.attribute_count_ && s.attribute_count_ > 0;
            w.pod<std::uint8_t>(present ? 1 : 0);
            if (!present) continue;
            w.pod<std::uint64_t>(st.removals_since_rebuild);
            w.pod<std::uint64_t>(st.peak_n);
            for (std::size_t a = 0; a < s.attribute_count_; ++a) {
                const auto& acc = st.acc[a];
                w.pod<std::uint64_t>(acc.n);
                w.pod(acc.mean);
                w.pod(acc.m2);
                w.pod(acc.m3);
                w.pod(acc.m4);
                w.pod(st.peak_m2[a]);
            }
        }
        w.pod<std::uint64_t>(s.rebuilds_);
        if (!out) throw StateError("failed writing snapshot");
    }

    static Preprocessor load(std::istream& in) {
        char magic[sizeof(kMagic)] = {};
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw StateError("not an engine snapshot");
        Reader r(in);
        const auto version = r.pod<std::uint32_t>();
        if (version != kVersion) throw StateError("unsupported snapshot version " + std::to_string(version));

        Preprocessor engine(config_from_json(r.str()));
        engine.fitted_ = r.pod<std::uint8_t>() != 0;
        engine.out_of_order_batches_ = r.pod<std::uint64_t>();

        GraphStore& g = engine.state_->graph;
        const bool has_t_now = r.pod<std::uint8_t>() != 0;
        const auto t_now = r.pod<std::int64_t>();

        const auto n_keys = r.pod<std::uint64_t>();
        for (std::uint64_t i = 0; i < n_keys; ++i) g.intern(r.str());

        const auto n_seen = r.pod<std::uint64_t>();
        g.seen_ids_.reserve(n_seen);
        for (std::uint64_t i = 0; i < n_seen; ++i) g.seen_ids_.insert(r.str());

        // Edges are replayed without the stats observer; accumulators are restored verbatim below.
        g.set_observer(nullptr);
        const auto n_edges = r.pod<std::uint64_t>();
        Transaction txn;
        txn.attributes.resize(g.attribute_count());
        for (std::uint64_t i = 0; i < n_edges; ++i) {
            txn.edge_id = r.str();
            const auto src = r.pod<std::uint32_t>();
            const auto dst = r.pod<std::uint32_t>();
            txn.timestamp = r.pod<std::int64_t>();
            for (auto& a : txn.attributes) a = r.pod<double>();
            if (src >= n_keys || dst >= n_keys) throw StateError("snapshot edge references unknown vertex");
            g.append_edge(txn, src, dst);
        }
        g.set_observer(&engine.state_->maintainer);
        if (has_t_now) g.t_now_ = t_now;

        VertexStats& s = engine.state_->stats;
        const auto n_attr = r.pod<std::uint64_t>();
        if (n_attr != s.attribute_count_) throw StateError("snapshot stat layout does not match its config");
        const auto n_states = r.pod<std::uint64_t>();
        s.states_.assign(n_states, {});
        for (auto& st : s.states_) {
            if (r.pod<std::uint8_t>() == 0) continue;
            st.acc.resize(n_attr);
            st.peak_m2.resize(n_attr);
            st.removals_since_rebuild = r.pod<std::uint64_t>();
            st.peak_n = r.pod<std::uint64_t>();
            for (std::size_t a = 0; a < n_attr; ++a) {
                auto& acc = st.acc[a];
                acc.n = r.pod<std::uint64_t>();
                acc.mean = r.pod<double>();
                acc.m2 = r.pod<double>();
                acc.m3 = r.pod<double>();
                acc.m4 = r.pod<double>();
                st.peak_m2[a] = r.pod<double>();
            }
        }
        s.rebuilds_ = r.pod<std::uint64_t>();

        if (auto problem = g.audit()) throw StateError("snapshot graph inconsistent: " + *problem);
        return engine;
    }
};

void save_snapshot(const Preprocessor& engine, std::ostream& out) { SnapshotCodec::save(engine, out); }

Preprocessor load_snapshot(std::istream& in) { return SnapshotCodec::load(in); }

}  // namespace gfp
