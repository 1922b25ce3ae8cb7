#include "generated_pairs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace erasure::testing {

namespace {

enum class Body { Plain, Echo };
enum class SysPost { None, Publish, Leak };
enum class UserPost { Constant, Branching };
enum class Mutation { None, Reread, Echo, LeakUser };

/// Collects `trans` lines and declares every non-template state they mention.
class Doc {
 public:
  Doc(std::string header, std::string domain, std::string initial)
      : header_(std::move(header)), domain_(std::move(domain)), initial_(std::move(initial)) {}

  void trans(const std::string& from, const std::string& to, const std::string& action,
             const std::string& var = "") {
    lines_ << "trans " << from << " -> " << to << " : " << action;
    if (!var.empty()) lines_ << " forall " << var;
    lines_ << "\n";
    for (const auto& s : {from, to}) {
      if (s.find('$') == std::string::npos && s != initial_) states_.insert(s);
    }
  }

  std::string text(bool other_channel) const {
    std::ostringstream out;
    out << header_ << "\ndomain { " << domain_ << " }\n";
    if (other_channel) out << "channel a erase\nchannel b other\n";
    out << "state " << initial_ << " initial\n";
    for (const auto& s : states_) out << "state " << s << "\n";
    out << lines_.str();
    return out.str();
  }

 private:
  std::string header_;
  std::string domain_;
  std::string initial_;
  std::set<std::string> states_;
  std::ostringstream lines_;
};

std::string n(const char* prefix, std::size_t j) { return prefix + std::to_string(j); }

struct Params {
  bool nested = false;
  std::vector<Body> bodies;
  SysPost sys_post = SysPost::None;
  UserPost user_post = UserPost::Constant;
  Mutation mutation = Mutation::None;
  std::string domain;
};

std::string sequential_system(const Params& p) {
  const std::size_t k = p.bodies.size();
  Doc d("system gen", p.domain, "p1");
  bool carried = false;
  for (std::size_t j = 1; j <= k; ++j) {
    const bool last = j == k;
    d.trans(n("p", j), n("q", j), "out a BE");
    d.trans(n("q", j), n("r", j) + "_$v", "in a $v", "v");
    if (p.bodies[j - 1] == Body::Plain) {
      if (last && p.sys_post == SysPost::Leak) {
        d.trans(n("r", j) + "_$v", "z_$v", "out a EE", "v");
        d.trans("z_$v", "end", "out b $v", "v");
        carried = true;
      } else {
        d.trans(n("r", j) + "_$v", n("p", j + 1), "out a EE", "v");
      }
    } else {
      d.trans(n("r", j) + "_$v", n("x", j), "out a $v", "v");
      d.trans(n("x", j), n("y", j) + "_$y", "in a $y", "y");
      d.trans(n("y", j) + "_$y", n("w", j) + "_$y", "out a EE", "y");
      d.trans(n("w", j) + "_$y", n("p", j + 1), "out b $y", "y");
    }
  }
  if (!carried && p.sys_post == SysPost::Publish) {
    d.trans(n("p", k + 1), "o_$y", "in a $y", "y");
    d.trans("o_$y", "end", "out b $y", "y");
  }
  return d.text(true);
}

std::string nested_system(const Params& p) {
  const std::size_t k = p.bodies.size();
  const bool leak = p.sys_post == SysPost::Leak;
  Doc d("system gen", p.domain, "p0");
  d.trans("p0", "m1", "out a BE");
  for (std::size_t j = 1; j < k; ++j) {
    d.trans(n("m", j), n("k", j), "in a $v", "v");
    d.trans(n("k", j), n("m", j + 1), "out a BE");
  }
  const std::string suffix = leak ? "_$v" : "";
  const std::string var = leak ? "v" : "";
  d.trans(n("m", k), n("k", k) + "_$v", "in a $v", "v");
  std::string at = n("k", k) + "_$v";
  for (std::size_t j = k; j >= 1; --j) {
    const std::string next = n("c", j - 1) + suffix;
    d.trans(at, next, "out a EE", at.find('$') != std::string::npos ? "v" : var);
    at = next;
  }
  if (leak) {
    d.trans("c0_$v", "end", "out b $v", "v");
  } else if (p.sys_post == SysPost::Publish) {
    d.trans("c0", "o_$y", "in a $y", "y");
    d.trans("o_$y", "end", "out b $y", "y");
  }
  return d.text(true);
}

std::size_t index_for(const Params& p, std::size_t j) {
  return p.mutation == Mutation::Reread && j == 2 ? 1 : j;
}

void user_post(Doc& d, const Params& p, const std::string& at) {
  if (p.sys_post != SysPost::Publish) return;
  if (p.user_post == UserPost::Constant) {
    d.trans(at, "end", "out a 1");
  } else {
    d.trans(at, "end", "out a 0");
    d.trans(at, "end2", "out a 1");
  }
}

std::string sequential_user(const Params& p) {
  const std::size_t k = p.bodies.size();
  Doc d("user gen", p.domain, "a1");
  bool carried = false;
  for (std::size_t j = 1; j <= k; ++j) {
    const bool last = j == k;
    const std::string read = "read i=" + std::to_string(index_for(p, j)) + " $v";
    d.trans(n("a", j), n("b", j), "in a BE");
    d.trans(n("b", j), n("c", j) + "_$v", read, "v");
    if (p.bodies[j - 1] == Body::Plain) {
      if (last && p.mutation == Mutation::LeakUser) {
        d.trans(n("c", j) + "_$v", n("d", j) + "_$v", "out a $v", "v");
        d.trans(n("d", j) + "_$v", "g_$v", "in a EE", "v");
        d.trans("g_$v", "end", "out a $v", "v");
        carried = true;
      } else {
        d.trans(n("c", j) + "_$v", n("d", j), "out a $v", "v");
        d.trans(n("d", j), n("a", j + 1), "in a EE");
      }
    } else {
      d.trans(n("c", j) + "_$v", n("d", j), "out a $v", "v");
      d.trans(n("d", j), n("e", j) + "_$x", "in a $x", "x");
      d.trans(n("e", j) + "_$x", n("f", j), p.mutation == Mutation::Echo ? "out a $x" : "out a 0", "x");
      d.trans(n("f", j), n("a", j + 1), "in a EE");
    }
  }
  if (!carried) user_post(d, p, n("a", k + 1));
  return d.text(false);
}

std::string nested_user(const Params& p) {
  const std::size_t k = p.bodies.size();
  const bool leak = p.mutation == Mutation::LeakUser;
  Doc d("user gen", p.domain, "a0");
  std::string at = "a0";
  for (std::size_t j = 1; j <= k; ++j) {
    const std::string read = "read i=" + std::to_string(index_for(p, j)) + " $v";
    d.trans(at, n("b", j), "in a BE");
    d.trans(n("b", j), n("c", j) + "_$v", read, "v");
    const bool carry = leak && j == k;
    at = n("d", j) + (carry ? "_$v" : "");
    d.trans(n("c", j) + "_$v", at, "out a $v", "v");
  }
  for (std::size_t j = k; j >= 1; --j) {
    const std::string next = n("g", j - 1) + (leak ? "_$v" : "");
    d.trans(at, next, "in a EE", leak ? "v" : "");
    at = next;
  }
  if (leak) {
    d.trans("g0_$v", "end", "out a $v", "v");
  } else {
    user_post(d, p, "g0");
  }
  return d.text(false);
}

std::string describe(const Params& p) {
  std::ostringstream s;
  s << (p.nested ? "nested" : "seq") << p.bodies.size() << "-";
  for (auto b : p.bodies) s << (b == Body::Plain ? 'P' : 'E');
  s << "-" << (p.sys_post == SysPost::None ? "halt" : p.sys_post == SysPost::Publish ? "publish" : "leak");
  s << "-" << (p.user_post == UserPost::Constant ? "const" : "branch");
  static const char* muts[] = {"none", "reread", "echo", "leakuser"};
  s << "-" << muts[static_cast<int>(p.mutation)] << "-d" << (p.domain.size() + 2) / 3;
  return s.str();
}

std::vector<std::vector<Body>> body_patterns(bool nested, std::size_t k) {
  std::vector<std::vector<Body>> out{std::vector<Body>(k, Body::Plain)};
  if (nested) return out;
  out.push_back(std::vector<Body>(k, Body::Echo));
  if (k >= 2) {
    std::vector<Body> mixed(k, Body::Plain);
    mixed.front() = Body::Echo;
    out.push_back(mixed);
  }
  return out;
}

}  // namespace

std::vector<GeneratedPair> generated_pairs() {
  std::vector<GeneratedPair> out;
  for (const std::string domain : {"0, 1", "0, 1, 2"}) {
    for (const bool nested : {false, true}) {
      for (std::size_t k = nested ? 2 : 1; k <= 3; ++k) {
        // The wider domain is only used for the smaller shapes.
        if (domain != "0, 1" && !nested && k > 1) continue;
        for (const auto& bodies : body_patterns(nested, k)) {
          const bool last_plain = bodies.back() == Body::Plain;
          const bool any_echo = std::find(bodies.begin(), bodies.end(), Body::Echo) != bodies.end();
          for (auto post : {SysPost::None, SysPost::Publish, SysPost::Leak}) {
            if (post == SysPost::Leak && !last_plain) continue;
            std::vector<UserPost> user_posts{UserPost::Constant};
            if (post == SysPost::Publish) user_posts.push_back(UserPost::Branching);
            for (auto up : user_posts) {
              std::vector<Mutation> muts{Mutation::None};
              if (k >= 2) muts.push_back(Mutation::Reread);
              if (any_echo) muts.push_back(Mutation::Echo);
              if (post == SysPost::Publish && last_plain) muts.push_back(Mutation::LeakUser);
              for (auto m : muts) {
                Params p{nested, bodies, post, up, m, domain};
                GeneratedPair g;
                g.name = describe(p);
                g.system_text = nested ? nested_system(p) : sequential_system(p);
                g.user_text = nested ? nested_user(p) : sequential_user(p);
                g.input_erasure_should_fail = post == SysPost::Leak;
                g.erasure_friendly_should_fail = m != Mutation::None;
                out.push_back(std::move(g));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace erasure::testing
