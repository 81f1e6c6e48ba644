#include "projcx/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "projcx/embedder.hpp"
#include "projcx/equivalence.hpp"
#include "projcx/families.hpp"
#include "projcx/normal_form.hpp"
#include "projcx/proj_space.hpp"
#include "projcx/slp.hpp"
#include "projcx/universal.hpp"

namespace projcx {

namespace {

struct NegativeResult {};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::bad_parameters, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) throw Error(ErrorKind::syntax_error, "bad number list '" + text + "'");
    out.push_back(std::stoull(part));
  }
  return out;
}

// `[1:2]x[0:3]` as raw residues, without rescaling
RawAssignment parse_raw_point(const std::string& text, std::uint64_t q) {
  RawAssignment pt;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '[') throw Error(ErrorKind::syntax_error, "bad point '" + text + "'");
    const std::size_t close = text.find(']', i);
    if (close == std::string::npos) throw Error(ErrorKind::syntax_error, "bad point '" + text + "'");
    std::string body = text.substr(i + 1, close - i - 1);
    std::vector<std::uint64_t> v;
    if (!body.empty()) {
      std::replace(body.begin(), body.end(), ':', ',');
      for (std::size_t x : parse_list(body)) v.push_back(q ? x % q : x);
    }
    pt.push_back(std::move(v));
    i = close + 1;
    if (i < text.size() && text[i] == 'x') ++i;
  }
  return pt;
}

class Cli {
public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"projcx: arithmetic circuits over products of projective spaces"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--field", field_text_, "field for constructions: gf:P or q");
    app.add_option("--threads", threads_, "worker threads for point enumeration")->check(CLI::Range(1u, 256u));
    app.add_option("--budget", budget_, "maximum enumeration points / gates")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed_, "random seed");
    register_commands(app);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    }
    try {
      action_();
      return kExitOk;
    } catch (const NegativeResult&) {
      return kExitNegative;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << '\n';
      if (e.kind() == ErrorKind::budget_exceeded || e.kind() == ErrorKind::resource_limit) return kExitBudget;
      return kExitUsage;
    }
  }

private:
  Field field() const { return field_text_.empty() ? Field::rationals() : parse_field(field_text_); }

  Circuit load(const std::string& path) const {
    Circuit c = parse_slp(read_file(path));
    if (!field_text_.empty() && !(c.field() == field())) c = convert_field(c, field());
    return c;
  }

  void emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::bad_parameters, "cannot write '" + path + "'");
    f << text;
  }

  std::uint64_t prime_q(std::uint64_t q) const {
    if (!is_prime(q)) throw Error(ErrorKind::bad_parameters, "--q " + std::to_string(q) + " is not prime");
    return q;
  }

  void register_commands(CLI::App& app) {
    auto* validate_cmd = app.add_subcommand("validate", "check homogeneity and report size and degrees");
    validate_cmd->add_option("input", in_, "SLP file")->required();
    validate_cmd->callback([this] {
      action_ = [this] {
        const Circuit c = load(in_);
        ValidationReport r;
        try {
          r = validate(c);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::inhomogeneous_sum) throw;
          out_ << "homogeneous no\n" << e.what() << '\n';
          throw NegativeResult{};
        }
        out_ << "blocks " << c.blocks().describe() << "\nfield " << c.field().describe() << "\nsize " << r.size << "\ngates " << c.gate_count()
             << "\noutputs " << c.outputs().size() << "\nhomogeneous yes\n";
        for (std::size_t i = 0; i < r.output_degrees.size(); ++i) out_ << "output " << i << " degree " << to_string(r.output_degrees[i]) << '\n';
      };
    });

    auto* normalize_cmd = app.add_subcommand("normalize", "rewrite into normal form");
    normalize_cmd->add_option("input", in_)->required();
    normalize_cmd->add_option("--out", out_path_);
    normalize_cmd->callback([this] { action_ = [this] { emit(out_path_, serialize_slp(normalize(load(in_)))); }; });

    auto* check_cmd = app.add_subcommand("check-nf", "check the six normal-form conditions");
    check_cmd->add_option("input", in_)->required();
    check_cmd->callback([this] {
      action_ = [this] {
        const NormalFormReport r = check_normal_form(load(in_));
        out_ << r.describe();
        if (!r.all_pass()) throw NegativeResult{};
      };
    });

    auto* universal_cmd = app.add_subcommand("universal", "build the universal circuit");
    add_layout_options(universal_cmd);
    universal_cmd->add_option("--out", out_path_);
    universal_cmd->add_option("--layout", layout_path_, "write the gate/edge layout sidecar");
    universal_cmd->callback([this] {
      action_ = [this] {
        const UniversalLayout layout = make_layout();
        emit(out_path_, serialize_slp(layout.materialize(field(), budget_)));
        if (!layout_path_.empty()) emit(layout_path_, serialize_layout(layout));
      };
    });

    auto* controlize_cmd = app.add_subcommand("controlize", "split every edge through a control variable");
    controlize_cmd->add_option("input", in_)->required();
    controlize_cmd->add_option("--out", out_path_);
    controlize_cmd->callback([this] { action_ = [this] { emit(out_path_, serialize_slp(controlize(load(in_)).first)); }; });

    auto* embed_cmd = app.add_subcommand("embed", "embed a normal-form circuit into a universal circuit");
    embed_cmd->add_option("input", in_)->required();
    add_layout_options(embed_cmd);
    embed_cmd->add_option("--out", out_path_, "tau file");
    embed_cmd->add_flag("--sparse", sparse_);
    embed_cmd->callback([this] {
      action_ = [this] {
        const UniversalLayout layout = make_layout();
        const Embedding emb = embed(load(in_), layout);
        emit(out_path_, serialize_tau(layout, emb.tau, sparse_));
      };
    });

    auto* reduce_cmd = app.add_subcommand("reduce", "reduce a bi-homogeneous circuit to the universal circuit resultant");
    reduce_cmd->add_option("input", in_)->required();
    reduce_cmd->add_option("--out", out_path_, "tau file (sparse)");
    reduce_cmd->add_option("--check", check_q_, "compare both sides on every x over GF(q)");
    reduce_cmd->callback([this] { action_ = [this] { reduce(); }; });

    auto* eval_cmd = app.add_subcommand("eval", "evaluate outputs at a point");
    eval_cmd->add_option("input", in_)->required();
    eval_cmd->add_option("--point", point_text_, "e.g. [1:2]x[0:1]")->required();
    eval_cmd->callback([this] {
      action_ = [this] {
        const Circuit c = load(in_);
        const std::uint64_t p = c.field().modulus();
        Assignment pt;
        for (const auto& block : parse_raw_point(point_text_, p)) {
          pt.emplace_back();
          for (std::uint64_t v : block) pt.back().emplace_back(c.field(), static_cast<std::int64_t>(v));
        }
        for (const auto& v : evaluate(c, pt)) out_ << v << '\n';
      };
    });

    auto* pit_cmd = app.add_subcommand("pit", "randomized identity test");
    pit_cmd->add_option("first", in_)->required();
    pit_cmd->add_option("second", in2_)->required();
    pit_cmd->add_option("--trials", trials_);
    pit_cmd->add_option("--p", pit_p_, "prime (default: the circuits' field, or 2^31-1)");
    pit_cmd->callback([this] {
      action_ = [this] {
        const Circuit a = load(in_), b = load(in2_);
        const PitVerdict v = pit_equal(a, b, PitOptions{trials_, pit_p_, seed_});
        out_ << v.to_line() << '\n';
        if (!v.equal) throw NegativeResult{};
      };
    });

    auto* expand_cmd = app.add_subcommand("expand", "coefficient table of each output");
    expand_cmd->add_option("input", in_)->required();
    expand_cmd->callback([this] {
      action_ = [this] {
        const auto polys = dense_expand(load(in_));
        for (std::size_t i = 0; i < polys.size(); ++i) out_ << "output " << i << ": " << format_poly(polys[i]) << '\n';
      };
    });

    auto* enumerate_cmd = app.add_subcommand("enumerate", "all points of a product of projective spaces");
    enumerate_cmd->add_option("--dims", dims_text_, "projective dimensions, e.g. 1,1")->required();
    enumerate_cmd->add_option("--q", q_)->required();
    enumerate_cmd->add_option("--out", out_path_);
    enumerate_cmd->callback([this] {
      action_ = [this] { emit(out_path_, serialize_point_set(enumerate(Ambient{parse_list(dims_text_), prime_q(q_)}, budget_))); };
    });

    auto* zeroset_cmd = app.add_subcommand("zeroset", "common zeros of the outputs over GF(q)");
    zeroset_cmd->add_option("input", in_)->required();
    zeroset_cmd->add_option("--q", q_)->required();
    zeroset_cmd->add_option("--out", out_path_);
    zeroset_cmd->callback([this] { action_ = [this] { emit(out_path_, serialize_point_set(zero_set(load(in_), prime_q(q_), budget_, threads_))); }; });

    auto* project_cmd = app.add_subcommand("project", "project a point set onto some components");
    project_cmd->add_option("input", in_, "point set file")->required();
    project_cmd->add_option("--keep", keep_text_, "component indices, e.g. 0")->required();
    project_cmd->add_option("--out", out_path_);
    project_cmd->callback([this] {
      action_ = [this] { emit(out_path_, serialize_point_set(project(parse_point_set(read_file(in_)), parse_list(keep_text_)))); };
    });

    auto* member_cmd = app.add_subcommand("member-ucr", "universal circuit resultant membership at fixed controls");
    member_cmd->add_option("--tau", tau_path_, "tau file")->required();
    member_cmd->add_option("--x", point_text_, "point of P^{n-1}, e.g. [1:0:0]")->required();
    member_cmd->add_option("--q", q_)->required();
    member_cmd->callback([this] {
      action_ = [this] {
        const auto [layout, tau] = parse_tau(read_file(tau_path_));
        const RawAssignment x = parse_raw_point(point_text_, prime_q(q_));
        if (x.size() != 1) throw Error(ErrorKind::shape_mismatch, "--x must have one component");
        const bool member = ucr_membership(layout, x[0], tau, q_, budget_);
        out_ << (member ? "member" : "non-member") << '\n';
        if (!member) throw NegativeResult{};
      };
    });

    auto* minors_cmd = app.add_subcommand("segre-minors", "2x2 minors cutting out the Segre image");
    minors_cmd->add_option("--a", a_)->required();
    minors_cmd->add_option("--b", b_)->required();
    minors_cmd->add_option("--out", out_path_);
    minors_cmd->callback([this] { action_ = [this] { emit(out_path_, serialize_slp(segre_minors(a_, b_, field()))); }; });

    auto* transform_cmd = app.add_subcommand("segre-transform", "substitute z = x t into a t-guarded circuit");
    transform_cmd->add_option("input", in_)->required();
    transform_cmd->add_option("--out", out_path_);
    transform_cmd->callback([this] { action_ = [this] { emit(out_path_, serialize_slp(segre_transform(load(in_)))); }; });

    auto* family_cmd = app.add_subcommand("family", "generate a family member");
    family_cmd->add_option("kind", family_, "point | unipoly | resultant")->required()->check(CLI::IsMember({"point", "unipoly", "resultant"}));
    family_cmd->add_option("--n", n_)->required();
    family_cmd->add_option("--d", d_);
    family_cmd->add_option("--out", out_path_);
    family_cmd->add_option("--meta", meta_path_, "metadata sidecar (default <out>.meta.jsonl)");
    family_cmd->callback([this] {
      action_ = [this] {
        const FamilyInstance f = family_ == "point" ? gen_point_family(n_, field())
                                 : family_ == "unipoly" ? gen_universal_poly(n_, d_, field())
                                                        : gen_resultant_incidence(d_, n_, field());
        emit(out_path_, serialize_slp(f.circuit));
        std::string meta = meta_path_;
        if (meta.empty() && !out_path_.empty() && out_path_ != "-") meta = out_path_ + ".meta.jsonl";
        if (!meta.empty()) emit(meta, family_metadata(f) + '\n');
      };
    });

    auto* pair_cmd = app.add_subcommand("pair", "diagonal pairing of (n, m), or its inverse with --k");
    pair_cmd->add_option("--n", n_);
    pair_cmd->add_option("--m", m_);
    pair_cmd->add_option("--k", k_);
    pair_cmd->callback([this] {
      action_ = [this] {
        if (k_) {
          const auto [n, m] = unpair(*k_);
          out_ << "n " << n << "\nm " << m << '\n';
        } else {
          out_ << "k " << pair_index(n_, m_) << '\n';
        }
      };
    });

    auto* stats_cmd = app.add_subcommand("stats", "sizes and degree profile of a universal construction");
    add_layout_options(stats_cmd);
    stats_cmd->add_flag("--ucr", ucr_, "the layout used for R_{n,m} (r = n, s = n^2+n+m)");
    stats_cmd->callback([this] { action_ = [this] { stats(); }; });

    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering");
    dot_cmd->add_option("input", in_)->required();
    dot_cmd->add_option("--out", out_path_);
    dot_cmd->callback([this] { action_ = [this] { emit(out_path_, export_dot(load(in_))); }; });
  }

  void add_layout_options(CLI::App* cmd) {
    cmd->add_option("--n", n_, "x-inputs and outputs per degree");
    cmd->add_option("--m", m_, "y-inputs");
    cmd->add_option("--r1", r1_);
    cmd->add_option("--r2", r2_);
    cmd->add_option("--s", s_);
    cmd->add_option("--alldeg", alldeg_r_, "union over all degree pairs up to (r, r)");
  }

  UniversalLayout make_layout() const {
    if (alldeg_r_) return universal_alldeg_layout(n_, m_, *alldeg_r_, s_);
    if (s_ < n_ + m_) throw Error(ErrorKind::bad_parameters, "--s must be at least n + m");
    if (r1_ == 0 && r2_ == 0) throw Error(ErrorKind::bad_parameters, "--r1/--r2 missing");
    return UniversalLayout(n_, m_, s_, {BiDegree{r1_, r2_}});
  }

  void stats() {
    if (ucr_) {
      const UcrParams p = ucr_params(n_, m_, budget_, true);
      out_ << "n " << p.n << "\nm " << p.m << "\nr " << p.r << "\ns " << p.s << "\ncontrols_N " << p.n_controls << "\noutputs_M " << p.outputs
           << "\nphi_gates " << p.phi_gates << "\nphi_prime_gates " << p.phi_prime_gates << "\nmaterialized " << (p.materialized ? "yes" : "no")
           << "\nquoted_M_n4 " << p.claimed_outputs << "\nambient P^" << p.ambient.first << " x P^" << p.ambient.second << '\n';
      return;
    }
    out_ << describe_layout(make_layout());
  }

  void reduce() {
    const Circuit c = load(in_);
    if (c.blocks().count() != 2) throw Error(ErrorKind::shape_mismatch, "reduce needs blocks (x, y)");
    const std::size_t n1 = c.blocks().size_of(0), n2 = c.blocks().size_of(1);
    const Reduction red = build_reduction(c, n1, n2);
    out_ << "n1 " << n1 << "\nn2 " << n2 << "\nd " << red.d << "\nsize " << red.size << "\nq " << red.q << "\ns " << red.layout.s()
         << "\ncontrols_N " << red.layout.edge_count() << "\noutputs_M " << red.layout.output_count() << "\ntau_nonzeros " << red.embedding.tau.nonzero_count()
         << '\n';
    if (!out_path_.empty()) emit(out_path_, serialize_tau(red.layout, red.embedding.tau, true));
    if (!check_q_) return;
    const std::uint64_t q = prime_q(*check_q_);
    const UcrOracle oracle(red.layout, red.embedding.tau, q);
    const ModEvaluator ce(c, q);
    std::size_t points = 0, agree = 0;
    for_each_point(
        Ambient{{n1 - 1}, q},
        [&](const ProjPoint& x) {
          const bool lhs = exists_witness(ce, RawAssignment{x.coords[0], std::vector<std::uint64_t>(n2)}, 1, n2, budget_);
          const auto padded = apply_component(red.rho, 0, x, q);
          const bool rhs = padded && oracle.member(*padded, budget_);
          ++points;
          agree += lhs == rhs;
          out_ << format_point(x) << ' ' << (lhs ? "in" : "out") << ' ' << (rhs ? "member" : "non-member") << '\n';
          return true;
        },
        budget_);
    out_ << "agree " << agree << '/' << points << '\n';
    if (agree != points) throw NegativeResult{};
  }

  std::ostream& out_;
  std::ostream& err_;
  std::function<void()> action_;

  std::string field_text_;
  unsigned threads_ = 1;
  std::uint64_t budget_ = kDefaultPointBudget;
  std::uint64_t seed_ = 0;

  std::string in_, in2_, out_path_, layout_path_, point_text_, dims_text_, keep_text_, tau_path_, family_, meta_path_;
  std::size_t n_ = 0, m_ = 0, trials_ = 50;
  std::uint32_t r1_ = 0, r2_ = 0, d_ = 2;
  std::optional<std::uint32_t> alldeg_r_;
  std::uint64_t s_ = 0, q_ = 0, pit_p_ = 0;
  std::optional<std::uint64_t> check_q_, k_;
  std::size_t a_ = 0, b_ = 0;
  bool sparse_ = false, ucr_ = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return Cli(out, err).run(args);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace projcx
