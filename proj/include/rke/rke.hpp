#pragma once

#include <rke/common.hpp>
#include <rke/chanqual.hpp>
#include <rke/hopctl.hpp>
#include <rke/linkctl.hpp>

#include <rke/authcore/primitives.hpp>
#include <rke/authcore/ecdsa.hpp>
#include <rke/authcore/certificate.hpp>
#include <rke/authcore/credentials.hpp>

#include <rke/protocol/message.hpp>
#include <rke/protocol/fob.hpp>
#include <rke/protocol/vehicle.hpp>
#include <rke/protocol/system.hpp>
#include <rke/protocol/session.hpp>

#include <rke/rfsim/rng.hpp>
#include <rke/rfsim/radio.hpp>
#include <rke/rfsim/link_sim.hpp>

#include <rke/scenario/config.hpp>
#include <rke/scenario/attacks.hpp>
#include <rke/scenario/metrics.hpp>
#include <rke/scenario/runner.hpp>
#include <rke/scenario/report.hpp>
