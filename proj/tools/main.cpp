#include "cli.hpp"

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

namespace {

volatile std::sig_atomic_t interrupted = 0;

extern "C" void on_sigint(int) {
  interrupted = 1;
  // a second Ctrl-C terminates immediately
  std::signal(SIGINT, SIG_DFL);
}

} // namespace

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::stop_source cancel;
  std::signal(SIGINT, on_sigint);
  std::jthread monitor([&](std::stop_token done) {
    while (!done.stop_requested()) {
      if (interrupted) {
        std::cerr << "interrupted, stopping workers\n";
        cancel.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  int code = logcrypt::cli::run(args, std::cout, std::cerr, cancel.get_token());
  monitor.request_stop();
  return code;
}
