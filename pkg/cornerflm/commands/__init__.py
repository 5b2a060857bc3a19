# Commands package for the click CLI
