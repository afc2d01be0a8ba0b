#ifndef DEGEN_ICP_DEGEN_ICP_HPP
#define DEGEN_ICP_DEGEN_ICP_HPP

#include <degen_icp/degeneracy.hpp>
#include <degen_icp/geometry.hpp>
#include <degen_icp/io.hpp>
#include <degen_icp/kdtree.hpp>
#include <degen_icp/linalg.hpp>
#include <degen_icp/normals.hpp>
#include <degen_icp/parallel.hpp>
#include <degen_icp/random.hpp>
#include <degen_icp/registration.hpp>
#include <degen_icp/simulation.hpp>
#include <degen_icp/types.hpp>

#endif  // DEGEN_ICP_DEGEN_ICP_HPP
