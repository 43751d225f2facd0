// Copyright 2026 The formstruct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in templates for the synthetic corpus. All text is already in the
// tokenizer's canonical spelling. Question titles must match exactly the
// keyword rule that gives their intended type (checked by the unit tests).

#include "formstruct/corpus.hpp"

namespace formstruct {
namespace {

using Q = QuestionTemplate;

const std::vector<std::string> kYesNo = {"yes", "no"};
const std::vector<std::string> kScores = {"1", "2", "3", "4", "5"};
const std::vector<std::string> kAgree3 = {"disagree", "neutral", "agree"};
const std::vector<std::string> kAgree5 = {"strongly disagree", "disagree", "neutral", "agree",
                                          "strongly agree"};

std::vector<TopicTemplate> DefaultTopics() {
  std::vector<TopicTemplate> t;

  t.push_back({"travel",
               {"travel booking request", "trip registration", "travel planning form"},
               {"please fill in your travel details so we can plan your trip .",
                "tell us where you want to go and we will handle the rest ."},
               "welcome to our travel booking service",
               {Q{"full name"},
                Q{"email address"},
                Q{"phone number"},
                Q{"name of your destination"},
                Q{"departure date"},
                Q{"return date"},
                Q{"preferred departure time"},
                Q{"which type of accommodation do you prefer ?",
                  {"hotel", "hostel", "apartment", "camping"}},
                Q{"do you need travel insurance ?", kYesNo},
                Q{"number of travelers"},
                Q{"rate your previous booking experience", kScores},
                Q{"upload a copy of your passport"},
                Q{"special requests or comments"}}});

  t.push_back({"job",
               {"job application", "employment application form", "career opportunities form"},
               {"thank you for your interest in joining our team .",
                "complete all sections of this application ."},
               "welcome to our application portal",
               {Q{"full name"},
                Q{"email address"},
                Q{"phone number"},
                Q{"which position are you applying for ?",
                  {"sales assistant", "software engineer", "project manager", "accountant"}},
                Q{"earliest start date"},
                Q{"upload your resume"},
                Q{"attach your cover letter"},
                Q{"are you legally allowed to work in this country ?", kYesNo},
                Q{"number of years of experience"},
                Q{"describe your relevant skills"},
                Q{"how much do you agree with the following statements ?",
                  {},
                  {"i enjoy working in a team", "i adapt quickly to change"},
                  kAgree3},
                Q{"preferred interview time"}}});

  t.push_back({"event",
               {"event registration", "conference signup", "workshop registration form"},
               {"register now to reserve your seat .",
                "join us for a day of talks and workshops ."},
               "welcome to the annual conference",
               {Q{"full name"},
                Q{"email address"},
                Q{"organization name"},
                Q{"which sessions will you attend ?",
                  {"morning keynote", "afternoon workshop", "evening reception"}},
                Q{"do you have any dietary restrictions ?",
                  {"none", "vegetarian", "vegan", "gluten free"}},
                Q{"arrival date"},
                Q{"arrival time"},
                Q{"select your shirt size", {"small", "medium", "large"}},
                Q{"rate your interest in the topics", kScores},
                Q{"comments for the organizers"}}});

  t.push_back({"feedback",
               {"customer feedback survey", "product feedback form", "customer satisfaction survey"},
               {"we value your opinion and read every response .",
                "help us improve our products and services ."},
               "welcome and thank you for shopping with us",
               {Q{"your name"},
                Q{"email address"},
                Q{"date of purchase"},
                Q{"which product did you buy ?", {"laptop", "phone", "tablet", "headphones"}},
                Q{"rate the product quality", kScores},
                Q{"rate our customer service", kScores},
                Q{"how much do you agree with the following statements ?",
                  {},
                  {"the product met my expectations", "the delivery was fast"},
                  kAgree5},
                Q{"would you recommend us to a friend ?", {"yes", "no", "maybe"}},
                Q{"upload a photo of the product"},
                Q{"explain any problems you experienced"},
                Q{"suggestions for improvement"}}});

  t.push_back({"course",
               {"course evaluation", "end of term survey", "class feedback form"},
               {"your answers are anonymous and help improve teaching .",
                "please evaluate the course you attended this term ."},
               "welcome to the course evaluation",
               {Q{"student name"},
                Q{"student id number"},
                Q{"which course are you evaluating ?",
                  {"mathematics", "biology", "history", "literature"}},
                Q{"rate the instructor", kScores},
                Q{"rate the course materials", kScores},
                Q{"how much do you agree with the following statements ?",
                  {},
                  {"the lectures were clear", "the workload was fair", "the exams were relevant"},
                  kAgree3},
                Q{"date of the final exam"},
                Q{"describe what you liked most"},
                Q{"upload your final project"},
                Q{"additional comments"}}});

  t.push_back({"health",
               {"health screening form", "patient intake form", "clinic registration"},
               {"please answer these questions before your visit .",
                "all information is kept private ."},
               "welcome to the clinic",
               {Q{"patient name"},
                Q{"date of birth"},
                Q{"phone number"},
                Q{"have you had a fever in the last week ?", kYesNo},
                Q{"do you have any allergies ?", {"yes", "no", "not sure"}},
                Q{"select your symptoms", {"cough", "headache", "fatigue", "sore throat"}},
                Q{"rate your pain level", kScores},
                Q{"preferred appointment time"},
                Q{"upload your insurance card"},
                Q{"list your current medications"},
                Q{"emergency contact name"}}});

  t.push_back({"volunteer",
               {"volunteer signup", "volunteer application", "community helpers form"},
               {"help us make a difference in our community .",
                "sign up to volunteer at our next event ."},
               "welcome volunteers",
               {Q{"full name"},
                Q{"email address"},
                Q{"phone number"},
                Q{"which days are you available ?", {"monday", "wednesday", "friday", "saturday"}},
                Q{"select a volunteer role", {"greeter", "setup crew", "food service", "cleanup"}},
                Q{"start date"},
                Q{"preferred shift time"},
                Q{"have you volunteered with us before ?", kYesNo},
                Q{"explain why you want to volunteer"},
                Q{"upload a signed waiver"}}});

  t.push_back({"club",
               {"club membership application", "membership renewal form", "new member registration"},
               {"become a member and enjoy all our activities .",
                "renew your membership for the coming year ."},
               "welcome to the club",
               {Q{"member name"},
                Q{"email address"},
                Q{"home address"},
                Q{"select a membership plan", {"monthly", "yearly", "lifetime"}},
                Q{"membership start date"},
                Q{"which activities interest you ?",
                  {"hiking", "chess", "book club", "photography"}},
                Q{"rate our facilities", kScores},
                Q{"how much do you agree with the following statements ?",
                  {},
                  {"events are well organized", "fees are reasonable"},
                  kAgree3},
                Q{"upload a profile photo"},
                Q{"reason for joining"}}});
  return t;
}

// Order matters: the first matching rule wins.
std::vector<KeywordRule> DefaultRules() {
  return {
      {{"upload", "attach"}, BlockType::kUpload},
      {{"date", "birthday"}, BlockType::kDate},
      {{"time"}, BlockType::kTime},
      {{"rate", "rating"}, BlockType::kRating},
      {{"agree", "statements"}, BlockType::kLikert},
      {{"note", "welcome", "instructions", "thank"}, BlockType::kDescription},
      {{"which", "select", "choose", "do you", "are you", "will you", "have you", "would you"},
       BlockType::kChoice},
      {{"name", "email", "phone", "address", "describe", "comments", "number", "explain",
        "reason", "suggestions", "list", "id"},
       BlockType::kTextField},
  };
}

}  // namespace

SyntheticSpec DefaultSyntheticSpec(int n_forms, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_forms = n_forms;
  spec.seed = seed;
  spec.topics = DefaultTopics();
  spec.rules = DefaultRules();
  spec.organizations = {"riverside", "maple",     "northwind", "summit",   "harbor",  "cedar",
                        "lakeside",  "granite",   "aurora",    "willow",   "redwood", "silverline",
                        "bluebird",  "oakridge",  "sunrise",   "pinecrest", "evergreen", "horizon",
                        "meadow",    "beacon",    "crescent",  "fairview", "highland", "westgate"};
  spec.neutral_titles = {"additional details", "other information", "further input",
                         "extra details",      "more information",  "follow up"};
  spec.neutral_types = {BlockType::kTextField, BlockType::kDate, BlockType::kTime,
                        BlockType::kUpload};
  return spec;
}

}  // namespace formstruct
