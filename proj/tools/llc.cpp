#include <exception>
#include <iostream>

#include "llc/config.hpp"
#include "llc/pipeline.hpp"

int main(int argc, char** argv) {
  try {
    auto cfg = llc::parse_config(argc, argv);
    if (!cfg) return 0;  // help requested
    llc::run_pipeline(*cfg);
    return 0;
  } catch (const llc::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const llc::FileError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const llc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const llc::WriteError& e) {
    std::cerr << "write error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
