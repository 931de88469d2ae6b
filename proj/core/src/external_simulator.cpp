#include "bsl/external_simulator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bsl/errors.hpp"

namespace bsl {

using nlohmann::json;

namespace {

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

int poll_readable(int fd, int timeout_ms) {
    struct pollfd p;
    p.fd = fd;
    p.events = POLLIN;
    p.revents = 0;
    return ::poll(&p, 1, timeout_ms);
}

}  // namespace

struct ExternalSimulator::Process {
    pid_t pid = -1;
    int to_child = -1;    // child stdin
    int from_child = -1;  // child stdout
    int child_err = -1;   // child stderr, nonblocking
    std::string read_buf;
    std::string err_tail;
    std::uint64_t next_id = 1;
    bool said_bye = false;

    void drain_stderr() {
        if (child_err < 0) return;
        char buf[512];
        for (;;) {
            const ssize_t got = ::read(child_err, buf, sizeof buf);
            if (got <= 0) break;
            err_tail.append(buf, static_cast<size_t>(got));
            if (err_tail.size() > 2048)
                err_tail.erase(0, err_tail.size() - 2048);
        }
    }

    std::string describe_stderr() {
        drain_stderr();
        if (err_tail.empty()) return "";
        return "; child stderr tail: " + err_tail;
    }

    void close_fd(int& fd) {
        if (fd >= 0) {
            ::close(fd);
            fd = -1;
        }
    }

    void write_line(const std::string& line) {
        std::string out = line;
        out.push_back('\n');
        size_t off = 0;
        while (off < out.size()) {
            const ssize_t put = ::write(to_child, out.data() + off, out.size() - off);
            if (put < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError("write to simulator child failed: " +
                                    std::string(std::strerror(errno)) +
                                    describe_stderr());
            }
            off += static_cast<size_t>(put);
        }
    }

    // One newline-terminated response within the deadline.
    std::string read_line(double timeout_s, const char* waiting_for) {
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::duration<double>(timeout_s);
        for (;;) {
            const auto nl = read_buf.find('\n');
            if (nl != std::string::npos) {
                std::string line = read_buf.substr(0, nl);
                read_buf.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0)
                throw ProtocolError(std::string("timeout waiting for ") +
                                    waiting_for + describe_stderr());
            const int r = poll_readable(from_child, static_cast<int>(left.count()));
            if (r < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError("poll on simulator child failed: " +
                                    std::string(std::strerror(errno)));
            }
            if (r == 0)
                throw ProtocolError(std::string("timeout waiting for ") +
                                    waiting_for + describe_stderr());
            char buf[4096];
            const ssize_t got = ::read(from_child, buf, sizeof buf);
            if (got < 0) {
                if (errno == EINTR) continue;
                throw ProtocolError("read from simulator child failed: " +
                                    std::string(std::strerror(errno)) +
                                    describe_stderr());
            }
            if (got == 0)
                throw ProtocolError(std::string("simulator child closed stdout while "
                                                "waiting for ") +
                                    waiting_for + describe_stderr());
            read_buf.append(buf, static_cast<size_t>(got));
        }
    }

    json read_json(double timeout_s, const char* waiting_for) {
        const std::string line = read_line(timeout_s, waiting_for);
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded())
            throw ProtocolError(std::string("malformed JSON from simulator child "
                                            "while waiting for ") +
                                waiting_for + ": " + line + describe_stderr());
        return parsed;
    }

    void shutdown() {
        if (pid < 0) return;
        if (to_child >= 0 && !said_bye) {
            try {
                write_line("{\"type\":\"bye\"}");
            } catch (const ProtocolError&) {
            }
            said_bye = true;
        }
        close_fd(to_child);
        // grace period, then SIGKILL
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::seconds(2);
        for (;;) {
            int status = 0;
            const pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid || (r < 0 && errno == ECHILD)) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                ::kill(pid, SIGKILL);
                ::waitpid(pid, &status, 0);
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        pid = -1;
        close_fd(from_child);
        close_fd(child_err);
    }

    ~Process() { shutdown(); }
};

ExternalSimulator::ExternalSimulator(ExternalSimulatorSpec spec)
    : spec_(std::move(spec)), proc_(new Process) {
    if (spec_.command.empty())
        throw InvalidArgumentError("external simulator: empty command");
    if (spec_.d_theta < 1 || spec_.d_s < 1 || spec_.n < 1)
        throw InvalidArgumentError(
            "external simulator: d_theta, d_s and n must be >= 1");
    if (!(spec_.handshake_timeout_s > 0.0) || !(spec_.request_timeout_s > 0.0))
        throw InvalidArgumentError("external simulator: timeouts must be > 0");

    ignore_sigpipe_once();

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
        throw ProtocolError("failed to create pipes for simulator child");

    const pid_t pid = ::fork();
    if (pid < 0) throw ProtocolError("fork failed for simulator child");
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                       err_pipe[0], err_pipe[1]})
            ::close(fd);
        std::vector<char*> argv;
        argv.reserve(spec_.command.size() + 1);
        for (const auto& a : spec_.command)
            argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }

    proc_->pid = pid;
    proc_->to_child = in_pipe[1];
    proc_->from_child = out_pipe[0];
    proc_->child_err = err_pipe[0];
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::fcntl(proc_->child_err, F_SETFL, O_NONBLOCK);

    json hello = {{"type", "hello"},
                  {"d_theta", spec_.d_theta},
                  {"d_s", spec_.d_s},
                  {"n", spec_.n}};
    proc_->write_line(hello.dump());
    const json ready = proc_->read_json(spec_.handshake_timeout_s, "ready");
    if (!ready.is_object() || ready.value("type", "") != "ready")
        throw ProtocolError("simulator child did not answer the handshake with "
                            "ready: " + ready.dump() + proc_->describe_stderr());
}

ExternalSimulator::~ExternalSimulator() = default;

SummaryVector ExternalSimulator::simulate_summary(const ParameterVector& theta,
                                                  std::uint64_t seed) const {
    if (theta.size() != spec_.d_theta)
        throw DimensionError("external simulator: theta has wrong dimension");

    std::lock_guard<std::mutex> lock(mutex_);
    Process& p = *proc_;
    const std::uint64_t id = p.next_id++;

    json req = {{"type", "sim"},
                {"id", id},
                {"theta", std::vector<double>(theta.data(), theta.data() + theta.size())},
                {"seed", seed},
                {"n", spec_.n}};
    p.write_line(req.dump());

    const json resp = p.read_json(spec_.request_timeout_s, "sum");
    if (!resp.is_object() || resp.value("type", "") != "sum")
        throw ProtocolError("simulator child sent a non-sum response: " +
                            resp.dump() + p.describe_stderr());
    if (!resp.contains("id") || !resp["id"].is_number() ||
        resp["id"].get<std::uint64_t>() != id) {
        std::ostringstream os;
        os << "simulator child answered with mismatched id (expected " << id
           << "): " << resp.dump();
        throw ProtocolError(os.str() + p.describe_stderr());
    }
    if (!resp.contains("summary") || !resp["summary"].is_array() ||
        resp["summary"].size() != static_cast<size_t>(spec_.d_s))
        throw ProtocolError("simulator child sent a summary of the wrong length: " +
                            resp.dump() + p.describe_stderr());

    SummaryVector s(spec_.d_s);
    for (int i = 0; i < spec_.d_s; ++i) {
        const auto& v = resp["summary"][static_cast<size_t>(i)];
        if (!v.is_number())
            throw ProtocolError("simulator child sent a non-numeric summary entry: " +
                                resp.dump() + p.describe_stderr());
        s[i] = v.get<double>();
    }
    return s;
}

}  // namespace bsl
