// SPDX-License-Identifier: Apache-2.0
#include "pforge/domains.hpp"

#include "pforge/errors.hpp"

namespace pforge {

DomainRegistry::DomainRegistry()
    : domains_{
          {"role-play-and-simulation", "Role-Play and Simulation", "characters, worlds, scenarios"},
          {"marketing-brand-and-social-strategy", "Marketing, Brand and Social Strategy", "positioning, campaigns, community"},
          {"entertainment-media-and-pop-culture", "Entertainment, Media and Pop Culture", "industry trends, fandoms, critique"},
          {"politics-and-public-policy", "Politics and Public Policy", "domestic governance, policy analysis"},
          {"sports-and-athletics", "Sports and Athletics", "rules, tactics, commentary"},
          {"education-and-instructional-design", "Education and Instructional Design", "curricula, pedagogy, assessment"},
          {"history-and-historiography", "History and Historiography", "events, sources, methods"},
          {"science-communication", "Science Communication", "explainers for lay audiences"},
          {"philosophy-and-ethics", "Philosophy and Ethics", "logic, moral frameworks, dilemmas"},
          {"psychology-and-behavioral-science", "Psychology and Behavioral Science", "cognition, behavior, motivation"},
          {"business-strategy-and-leadership", "Business Strategy and Leadership", "org models, scaling, executive practice"},
          {"career-coaching-and-job-search", "Career Coaching and Job Search", "resumes, interviews, growth plans"},
          {"health-and-medicine", "Health and Medicine", "conditions, care models, health systems"},
          {"software-and-digital-transformation", "Software and Digital Transformation", "development topics, IT modernization"},
          {"environment-and-sustainability", "Environment and Sustainability", "climate, conservation, stewardship"},
          {"economics-and-markets", "Economics and Markets", "theory, policy, market dynamics"},
          {"law-and-legal-literacy", "Law and Legal Literacy", "rights, procedures, legal concepts"},
          {"human-resources-and-people-ops", "Human Resources and People Ops", "hiring, performance, culture"},
          {"project-and-program-management", "Project and Program Management", "planning, delivery, PMO"},
          {"corporate-finance-and-investing", "Corporate Finance and Investing", "valuation, portfolio theory"},
          {"real-estate-and-urban-development", "Real Estate and Urban Development", "property, zoning, city growth"},
          {"travel-and-tourism", "Travel and Tourism", "itineraries, cultural etiquette, destinations"},
          {"food-and-culinary-arts", "Food and Culinary Arts", "techniques, cuisines, menu ideas"},
          {"fashion-and-personal-style", "Fashion and Personal Style", "aesthetics, wardrobe systems"},
          {"creative-arts-and-music-production", "Creative Arts and Music Production", "visual design, composition, recording"},
          {"gaming-and-interactive-media", "Gaming and Interactive Media", "mechanics, design, esports"},
          {"relationships-family-and-parenting", "Relationships, Family and Parenting", "communication, development, dynamics"},
          {"personal-productivity-and-time-management", "Personal Productivity and Time Management", "workflows, habits, tools"},
          {"home-diy-and-gardening", "Home, DIY and Gardening", "projects, materials, horticulture"},
          {"pet-care-and-animal-behavior", "Pet Care and Animal Behavior", "training, enrichment, health basics"},
          {"automotive-and-mobility", "Automotive and Mobility", "vehicles, maintenance, transport tech"},
          {"fitness-and-nutrition", "Fitness and Nutrition", "training programs, diet planning, performance"},
          {"mental-health-and-wellbeing", "Mental Health and Wellbeing", "coping skills, mindfulness, supports"},
          {"spirituality-and-comparative-religion", "Spirituality and Comparative Religion", "beliefs, practices, traditions"},
          {"social-and-cultural-studies", "Social and Cultural Studies", "institutions, norms, anthropology"},
          {"international-relations-and-geopolitics", "International Relations and Geopolitics", "states, alliances, strategy"},
          {"journalism-and-media-literacy", "Journalism and Media Literacy", "reporting, verification, bias detection"},
          {"communication-persuasion-and-rhetoric", "Communication, Persuasion and Rhetoric", "argumentation, framing, style"},
          {"artificial-intelligence-and-data-science", "Artificial Intelligence and Data Science", "models, analytics, insights"},
          {"innovation-and-design-thinking", "Innovation and Design Thinking", "discovery, prototyping, iteration"},
          {"entrepreneurship-and-startups", "Entrepreneurship and Startups", "idea validation, traction, funding"},
      } {}

const DomainRegistry& DomainRegistry::builtin() {
    static const DomainRegistry registry;
    return registry;
}

const Domain* DomainRegistry::find(std::string_view id) const {
    for (const auto& d : domains_) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

const Domain& DomainRegistry::at(std::string_view id) const {
    if (const Domain* d = find(id)) return *d;
    throw Error(ErrorCode::Validation, "unknown domain '" + std::string(id) + "'");
}

}  // namespace pforge
