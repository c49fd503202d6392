#pragma once

// Reference scorer for the wire protocol: answers every well-formed request
// with one fixed distribution.

#include <netinet/in.h>

#include <istream>
#include <ostream>
#include <regex>
#include <string>
#include <thread>

#include "mergeweave/classifier.hpp"

namespace mergeweave {

inline constexpr LabelProbs kStubDistribution = {0.30, 0.20, 0.10, 0.10, 0.10, 0.05, 0.05, 0.05, 0.05};

/// Reply line (without newline) for one request line.
inline std::string stub_reply(std::string_view line) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    std::optional<long long> id;
    if (!j.is_discarded() && j.is_object() && j.contains("id") && j["id"].is_number_integer())
        id = j["id"].get<long long>();
    if (!id) {
        // salvage the id from text that is not valid JSON
        static const std::regex id_re(R"re("id"\s*:\s*(-?[0-9]+))re");
        std::string s(line);
        std::smatch m;
        if (std::regex_search(s, m, id_re)) id = std::stoll(m[1].str());
    }
    if (j.is_discarded()) return error_response_json(id, "malformed JSON").dump();
    if (!id) return error_response_json(id, "missing integer id").dump();
    try {
        model_input_from_json(j);
    } catch (const std::exception& e) {
        return error_response_json(id, std::string("bad request: ") + e.what()).dump();
    }
    return prediction_response_json(*id, kStubDistribution).dump();
}

/// Serves requests from `in` until EOF. Blank lines are ignored.
inline void run_stub_scorer(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out << stub_reply(line) << '\n';
        if (in.rdbuf()->in_avail() <= 0) out.flush();
    }
    out.flush();
}

namespace detail {

inline void serve_stub_connection(Fd conn) {
    std::string inbox;
    char buf[65536];
    for (;;) {
        auto r = ::read(conn.get(), buf, sizeof buf);
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) return;
        inbox.append(buf, static_cast<std::size_t>(r));
        std::string replies;
        std::size_t nl;
        while ((nl = inbox.find('\n')) != std::string::npos) {
            std::string line = inbox.substr(0, nl);
            inbox.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            replies += stub_reply(line);
            replies.push_back('\n');
        }
        std::size_t sent = 0;
        while (sent < replies.size()) {
            auto w = ::send(conn.get(), replies.data() + sent, replies.size() - sent, MSG_NOSIGNAL);
            if (w < 0 && errno == EINTR) continue;
            if (w <= 0) return;
            sent += static_cast<std::size_t>(w);
        }
    }
}

}  // namespace detail

/// Binds 127.0.0.1:port (0 picks a free port) and returns the listening
/// socket and the bound port.
inline std::pair<Fd, int> listen_tcp(int port) {
    Fd s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s) throw std::system_error(errno, std::generic_category(), "socket");
    int one = 1;
    ::setsockopt(s.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(s.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw std::system_error(errno, std::generic_category(), "bind");
    if (::listen(s.get(), 16) != 0) throw std::system_error(errno, std::generic_category(), "listen");
    socklen_t len = sizeof addr;
    ::getsockname(s.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    return {std::move(s), ntohs(addr.sin_port)};
}

/// Accept loop; one thread per connection. Runs until the socket fails.
inline void serve_stub_tcp(const Fd& listener) {
    ignore_sigpipe();
    for (;;) {
        int c = ::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC);
        if (c < 0) {
            if (errno == EINTR) continue;
            return;
        }
        std::thread(detail::serve_stub_connection, Fd(c)).detach();
    }
}

}  // namespace mergeweave
