#ifndef SARQA_VERSION_HPP
#define SARQA_VERSION_HPP

#define SARQA_VERSION "0.1.0"

#endif
